from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import graphs
from graphshare.game import (
    R,
    T,
    TR,
    TR_CANONICAL,
    TR_MISERE,
    GameState,
    IllegalMove,
    Player,
    Ruleset,
    Status,
    StrategyError,
    Transcript,
    apply,
    is_terminal,
    legal_moves,
    replay,
    simulate,
    winner,
)
from graphshare.graph_core import (
    WeightedGraph,
    articulation_vertices,
    cycle_graph,
    is_connected,
    is_k_connected,
    path_graph,
    star_graph,
)
from graphshare.strategies import GreedyStrategy, OptimalStrategy, RandomStrategy, Strategy

ALL = (T, R, TR, TR_CANONICAL, TR_MISERE)


def _atlas(max_n, two_connected=False):
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() > max_n or not nx.is_connected(g):
            continue
        G = WeightedGraph(g.number_of_nodes(), list(g.edges()))
        if two_connected and (G.n < 3 or not is_k_connected(G, 2)):
            continue
        yield G


def _maximal_lengths(G, rs):
    """Lengths of all maximal playouts (exhaustive)."""
    out = set()

    def rec(state):
        moves = list(legal_moves(state))
        if not moves:
            out.add(len(state.taken))
            return
        for v in moves:
            rec(apply(state, v))

    rec(GameState.initial(G, rs))
    return out


def test_ruleset_parse_and_names():
    for name in ("t", "r", "tr", "tr-canonical", "tr-misere"):
        assert Ruleset.parse(name).name == name
    with pytest.raises(ValueError):
        Ruleset.parse("x")


def test_legal_move_examples():
    G = path_graph([0, 1, 0])
    assert sorted(legal_moves(GameState.initial(G, T))) == [0, 1, 2]
    assert sorted(legal_moves(GameState.initial(G, R))) == [0, 2]
    star = star_graph(3)
    s = apply(GameState.initial(star, TR), 1)
    assert not legal_moves(s)
    assert is_terminal(s) is Status.STALLED


def test_apply_credits_mover():
    s = apply(GameState.initial(cycle_graph([1, 1, 1, 1]), T), 0)
    assert s.alice_gain == 1 and s.to_move is Player.BOB


def test_illegal_moves_name_condition():
    G = path_graph([0, 1, 0])
    with pytest.raises(IllegalMove) as e:
        apply(GameState.initial(G, R), 1)
    assert e.value.condition == "R"
    s = apply(GameState.initial(G, T), 0)
    with pytest.raises(IllegalMove) as e:
        apply(s, 2)
    assert e.value.condition == "T"
    with pytest.raises(IllegalMove) as e:
        apply(s, 0)
    assert e.value.condition == "taken"


@given(graphs(max_n=10), st.sampled_from(ALL), st.lists(st.integers(0, 10**6), max_size=12))
def test_state_invariants_along_random_playouts(G, rs, choices):
    state = GameState.initial(G, rs)
    for c in choices:
        moves = sorted(legal_moves(state))
        if not moves:
            break
        before = state
        state = apply(state, moves[c % len(moves)])
        assert len(state.taken) == len(before.taken) + 1
        assert state.to_move is before.to_move.other
        assert state.alice_gain + state.bob_gain == G.weight_of(state.taken)
        if rs.needs_r:
            assert is_connected(G, state.remaining)
        if rs.needs_t:
            assert is_connected(G, state.taken)


@given(graphs(max_n=9), st.lists(st.integers(0, 10**6), max_size=9))
def test_r_moves_are_non_articulation(G, choices):
    state = GameState.initial(G, R)
    for c in choices:
        rem = state.remaining
        expected = set(rem) if len(rem) <= 2 else set(rem) - set(articulation_vertices(G, rem))
        assert set(legal_moves(state)) == expected
        if not expected:
            break
        state = apply(state, sorted(expected)[c % len(expected)])


def test_t_and_r_never_stall():
    for G in _atlas(6):
        for rs in (T, R):
            assert _maximal_lengths(G, rs) == {G.n}


def test_tr_never_stalls_on_two_connected():
    for G in _atlas(6, two_connected=True):
        assert _maximal_lengths(G, TR) == {G.n}


@pytest.mark.slow
def test_tr_never_stalls_on_two_connected_seven():
    for G in _atlas(7, two_connected=True):
        if G.n == 7:
            assert _maximal_lengths(G, TR) == {7}


def test_winner_rules():
    star = star_graph(3)
    s = apply(GameState.initial(star, TR_CANONICAL), 1)
    assert winner(s) is Player.ALICE
    s = apply(GameState.initial(star, TR_MISERE), 1)
    assert winner(s) is Player.BOB
    assert winner(GameState.initial(star, TR_CANONICAL)) is None


def test_simulate_examples():
    t = simulate(cycle_graph([1, 1, 1, 1]), T, GreedyStrategy(), GreedyStrategy())
    assert (t.alice_gain, t.bob_gain) == (2, 2)
    t = simulate(path_graph([0, 1, 0]), R, OptimalStrategy(), OptimalStrategy())
    assert (t.alice_gain, t.bob_gain) == (0, 1)


@given(graphs(max_n=8), st.sampled_from(ALL), st.integers(0, 1000))
def test_simulate_replays_and_is_deterministic(G, rs, seed):
    t1 = simulate(G, rs, RandomStrategy(1), RandomStrategy(2), seed=seed)
    t2 = simulate(G, rs, RandomStrategy(1), RandomStrategy(2), seed=seed)
    assert t1.moves == t2.moves
    final = replay(G, rs, Transcript.from_text(t1.to_text()))
    assert final.alice_gain == t1.alice_gain


def test_replay_rejects_tampering():
    G = path_graph([0, 1, 0])
    t = simulate(G, R, GreedyStrategy(), GreedyStrategy())
    t.alice_gain += 1
    with pytest.raises(ValueError):
        replay(G, R, t)


class _Cheater(Strategy):
    name = "cheater"

    def choose(self, state):
        return next(iter(state.taken), 1)


def test_simulate_reports_illegal_strategy():
    with pytest.raises(StrategyError) as e:
        simulate(path_graph([0, 1, 0]), R, _Cheater(), GreedyStrategy())
    assert e.value.state is not None


def test_transcript_text_round_trip():
    t = Transcript([(Player.ALICE, 0), (Player.BOB, 1)], Fraction(1, 2), Fraction(3), Status.ALL_TAKEN)
    assert Transcript.from_text(t.to_text()).to_text() == t.to_text()
