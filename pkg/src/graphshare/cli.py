"""Command line front end.

Exit codes: 0 success, 1 domain error (illegal move, bad formula or graph),
2 usage error, 3 resource limit (memo capacity).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, TextIO

from .constructions import (
    SEARCH_LIMITS,
    ExpanderParams,
    GenerationError,
    centered_path,
    clique_cycle,
    gnk_graph,
    hnk_graph,
    leafy_expander,
    pizza_cycle,
    search_extremal,
    xyz_graph,
)
from .game import (
    GameState,
    IllegalMove,
    Player,
    Ruleset,
    Scoring,
    Status,
    StrategyError,
    Transcript,
    apply,
    format_rational,
    is_terminal,
    legal_moves,
    simulate,
)
from .graph_core import GraphError, WeightedGraph, format_graph, read_graph, write_graph
from .qbf import QbfError, parse_qdimacs, pad_parity
from .reductions import compile_canonical, compile_misere, compile_weighted
from .solver import MemoCapacityError, SolveResult, solve, solve_parallel
from .strategies import STRATEGY_NAMES, GreedyStrategy, OptimalStrategy, Strategy, make_strategy
from .tr_analysis import full_order, tr_classify

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
GAMES = ("t", "r", "tr", "tr-canonical", "tr-misere")
FAMILIES = ("pizza", "clique-cycle", "xyz", "hnk", "gnk", "centered-path", "expander")
# engines above this size fall back to greedy in the REPL
REPL_SOLVE_LIMIT = 24
SIDES = {"alice": Player.ALICE, "bob": Player.BOB}


class UsageError(Exception):
    pass


def _weights(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",") if x]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad weight list {text!r}") from None


def _print_result(res: SolveResult, out: TextIO) -> None:
    out.write(f"game {res.ruleset.name}\n")
    if res.ruleset.scoring is Scoring.WEIGHT:
        out.write(f"alice_value {format_rational(res.alice_value)}\n")
        out.write(f"bob_value {format_rational(res.bob_value)}\n")
    else:
        out.write(f"winner {res.winner.name.lower()}\n")
    out.write("pv " + " ".join(map(str, res.principal_variation)) + "\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_solve(args, out: TextIO) -> int:
    G = read_graph(args.graph)
    rs = Ruleset.parse(args.game)
    kwargs = {"compress": not args.no_twins}
    if args.memo_cap:
        kwargs["memo_cap"] = args.memo_cap
    if args.threads > 1:
        res = solve_parallel(G, rs, args.threads, **kwargs)
    else:
        res = solve(G, rs, **kwargs)
    _print_result(res, out)
    return EXIT_OK


def _engine_for(G: WeightedGraph, name: Optional[str], seed: int) -> Strategy:
    if name:
        return make_strategy(name, seed)
    return OptimalStrategy() if G.n <= REPL_SOLVE_LIMIT else GreedyStrategy()


def _summary(state: GameState) -> str:
    rem = sorted(state.remaining)
    legal = sorted(legal_moves(state))
    return (
        f"remaining {' '.join(map(str, rem))}\n"
        f"legal {' '.join(map(str, legal))}\n"
        f"gains alice {format_rational(state.alice_gain)} bob {format_rational(state.bob_gain)}\n"
    )


def play_repl(
    G: WeightedGraph,
    ruleset: Ruleset,
    human_side: Player,
    engine: Strategy,
    stdin: Optional[TextIO] = None,
    stdout: Optional[TextIO] = None,
    seed: int = 0,
) -> Transcript:
    """Human against engine on a text stream; ``quit`` or end of input aborts."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    engine.reset(seed)
    stdout.write(f"engine {engine.name}\n")
    state = GameState.initial(G, ruleset)
    transcript = Transcript()
    while is_terminal(state) is Status.ONGOING:
        player = state.to_move
        if player is human_side:
            stdout.write(_summary(state))
            stdout.write(f"{player.name.lower()}> ")
            stdout.flush()
            line = stdin.readline()
            if not line or line.strip() == "quit":
                stdout.write("\naborted\n" if not line else "aborted\n")
                break
            token = line.strip()
            try:
                v = int(token)
            except ValueError:
                stdout.write(f"illegal: {token!r} is not a vertex number\n")
                continue
            try:
                after = apply(state, v)
            except IllegalMove as e:
                stdout.write(f"illegal: {e}\n")
                continue
        else:
            v = engine.choose(state)
            after = apply(state, v)
            stdout.write(f"engine takes {v}\n")
        engine.observe(state, v, after)
        transcript.moves.append((player, v))
        state = after
    transcript.alice_gain, transcript.bob_gain = state.alice_gain, state.bob_gain
    transcript.reason = is_terminal(state)
    stdout.write(transcript.to_text())
    return transcript


def cmd_play(args, out: TextIO) -> int:
    G = read_graph(args.graph)
    rs = Ruleset.parse(args.game)
    engine = _engine_for(G, args.engine, args.seed)
    out.write(f"seed {args.seed}\n")
    t = play_repl(G, rs, SIDES[args.side], engine, stdout=out, seed=args.seed)
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            fh.write(t.to_text())
    return EXIT_OK


def cmd_simulate(args, out: TextIO) -> int:
    G = read_graph(args.graph)
    rs = Ruleset.parse(args.game)
    alice = make_strategy(args.alice, args.seed, args.threshold)
    bob = make_strategy(args.bob, args.seed, args.threshold)
    out.write(f"seed {args.seed}\n")
    t = simulate(G, rs, alice, bob, seed=args.seed)
    out.write(t.to_text())
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            fh.write(t.to_text())
    return EXIT_OK


_FAMILY_PARAMS = {
    "pizza": {"weights"},
    "clique-cycle": {"k", "blocks"},
    "xyz": {"k", "m"},
    "hnk": {"n", "k"},
    "gnk": {"n", "k"},
    "centered-path": {"t"},
    "expander": {"n", "epsilon"},
}


def cmd_construct(args, out: TextIO) -> int:
    given = {p for p in ("weights", "k", "m", "n", "blocks", "t", "epsilon") if getattr(args, p) is not None}
    need = _FAMILY_PARAMS[args.family]
    if given - need:
        raise UsageError(f"{args.family} does not take --{', --'.join(sorted(given - need))}")
    if need - given:
        raise UsageError(f"{args.family} needs --{', --'.join(sorted(need - given))}")
    f = args.family
    if f == "pizza":
        G = pizza_cycle(_weights(args.weights))
    elif f == "clique-cycle":
        G = clique_cycle(args.k, args.blocks)
    elif f == "xyz":
        G = xyz_graph(args.k, args.m)
    elif f == "hnk":
        G = hnk_graph(args.n, args.k)
    elif f == "gnk":
        G = gnk_graph(args.n, args.k)
    elif f == "centered-path":
        G = centered_path(args.t)
    else:
        out.write(f"seed {args.seed}\n")
        try:
            eps = float(args.epsilon)
        except ValueError:
            raise UsageError(f"bad epsilon {args.epsilon!r}") from None
        _, G, report = leafy_expander(ExpanderParams(eps, args.n, args.seed))
        for key, value in vars(report).items():
            if key.startswith("biclique"):
                value = f"found={str(value.found).lower()} exhaustive={str(value.exhaustive).lower()}"
            elif isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = f"{value:.4f}"
            out.write(f"{key} {value}\n")
    if args.out:
        write_graph(G, args.out)
        out.write(f"vertices {G.n}\n")
    else:
        out.write(format_graph(G))
    return EXIT_OK


def cmd_reduce(args, out: TextIO) -> int:
    if args.target != "weighted" and (args.z_size is not None or args.unscaled):
        raise UsageError("--z-size and --unscaled apply to the weighted target only")
    with open(args.qbf, encoding="utf-8") as fh:
        f = parse_qdimacs(fh.read())
    if args.pad:
        f = pad_parity(f, args.target)
    scale = 1
    if args.target == "canonical":
        G, gm = compile_canonical(f)
    elif args.target == "misere":
        G, gm = compile_misere(f)
    else:
        G, gm, scale = compile_weighted(f, z_size=args.z_size)
        if args.unscaled:
            G = WeightedGraph(G.n, G.edges, [w / scale for w in G.weights], G.labels)
    text = format_graph(G)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.labels:
        with open(args.labels, "w", encoding="utf-8") as fh:
            fh.write(gm.to_text())
    out.write(f"vertices {G.n}\n")
    out.write(f"scale {scale}\n")
    return EXIT_OK


def cmd_check_tr(args, out: TextIO) -> int:
    G = read_graph(args.graph)
    verdict = tr_classify(G)
    out.write(f"completable {str(verdict.completable).lower()}\n")
    out.write(f"always_completes {str(verdict.always_completes).lower()}\n")
    if verdict.witness is not None:
        out.write("witness " + " ".join(map(str, verdict.witness)) + "\n")
    if verdict.obstruction:
        out.write(f"obstruction {verdict.obstruction}\n")
    return EXIT_OK


def cmd_order(args, out: TextIO) -> int:
    G = read_graph(args.graph)
    order = full_order(G, args.u, args.v)
    out.write("order " + " ".join(map(str, order)) + "\n")
    return EXIT_OK


def cmd_search(args, out: TextIO) -> int:
    rs = Ruleset.parse(args.game)
    out.write(f"seed {args.seed}\n")
    res = search_extremal(
        args.family, args.max_n, tuple(_weights(args.weights)), rs,
        min_n=args.min_n, samples=args.samples, seed=args.seed,
    )
    G = res.graph
    out.write(f"examined {res.examined}\n")
    out.write(f"n {G.n}\n")
    out.write("weights " + ",".join(str(w) for w in G.weights) + "\n")
    out.write(f"alice_value {format_rational(res.alice_value)}\n")
    out.write(f"total {format_rational(res.total)}\n")
    out.write(f"fraction {format_rational(res.fraction)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphshare", description="Vertex-taking games on weighted graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="exact value or winner")
    s.add_argument("--graph", required=True)
    s.add_argument("--game", choices=GAMES, default="t")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--memo-cap", type=int, default=0)
    s.add_argument("--no-twins", action="store_true", help="disable twin compression")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("play", help="play against an engine on stdin")
    s.add_argument("--graph", required=True)
    s.add_argument("--game", choices=GAMES, default="t")
    s.add_argument("--side", choices=("alice", "bob"), default="alice")
    s.add_argument("--engine", choices=STRATEGY_NAMES)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--transcript")
    s.set_defaults(func=cmd_play)

    s = sub.add_parser("simulate", help="strategy against strategy")
    s.add_argument("--graph", required=True)
    s.add_argument("--game", choices=GAMES, default="t")
    s.add_argument("--alice", choices=STRATEGY_NAMES, default="greedy")
    s.add_argument("--bob", choices=STRATEGY_NAMES, default="greedy")
    s.add_argument("--threshold", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--transcript")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("construct", help="build a named graph family")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("--weights")
    s.add_argument("--k", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--blocks", type=int)
    s.add_argument("--t", type=int)
    s.add_argument("--epsilon")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("reduce", help="compile a QDIMACS formula into a game graph")
    s.add_argument("target", choices=("canonical", "misere", "weighted"))
    s.add_argument("--qbf", required=True)
    s.add_argument("--out")
    s.add_argument("--labels")
    s.add_argument("--z-size", type=int)
    s.add_argument("--unscaled", action="store_true", help="emit rational weights instead of scaled integers")
    s.add_argument("--pad", action="store_true", help="append an unused variable to fix the parity")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("check-tr", help="does game TR take every vertex")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_check_tr)

    s = sub.add_parser("order", help="full take order between two vertices of a 2-connected graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--u", type=int, required=True)
    s.add_argument("--v", type=int, required=True)
    s.set_defaults(func=cmd_order)

    s = sub.add_parser("search", help="smallest Alice share over a graph family")
    s.add_argument("--family", choices=tuple(SEARCH_LIMITS), default="cycles")
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--min-n", type=int, default=3)
    s.add_argument("--weights", default="0,1")
    s.add_argument("--game", choices=GAMES[:3], default="t")
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_search)
    return p


def run(argv=None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        return args.func(args, out)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except MemoCapacityError as e:
        err.write(f"resource limit: {e}\n")
        return EXIT_RESOURCE
    except (IllegalMove, StrategyError, QbfError, GraphError, GenerationError, ValueError, OSError) as e:
        err.write(f"error: {e}\n")
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
