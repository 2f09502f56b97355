"""Exact engine, solver and reduction compiler for graph sharing games."""

from .game import (
    R,
    T,
    TR,
    TR_CANONICAL,
    TR_MISERE,
    GameState,
    IllegalMove,
    Player,
    Ruleset,
    Scoring,
    Status,
    Transcript,
    Variant,
    apply,
    is_terminal,
    legal_moves,
    replay,
    simulate,
)
from .graph_core import (
    GraphError,
    VertexSet,
    WeightedGraph,
    articulation_vertices,
    block_cut_tree,
    girth,
    is_connected,
    is_k_connected,
    parse_graph,
    format_graph,
    twin_classes,
)
from .solver import (
    MemoCapacityError,
    SolveResult,
    Solver,
    best_response,
    brute_force_value,
    solve,
    solve_weight,
    solve_win,
)

__version__ = "0.1.0"
