"""Exact solving of the vertex-taking games.

The searcher works on bit masks.  Weights are scaled to integers by the
least common multiple of their denominators so values compare exactly and
null-window searches are well defined.

Two kinds of positions are distinguished for weight scoring:

* *safe* positions, from which the game can never stall (games T and R
  always; game TR once every remaining vertex touches the taken set, since
  condition (T) then holds for every later move).  There the two gains sum
  to the remaining weight, so the searcher runs fail-soft alpha-beta on the
  mover's gain with a bounds table.
* unsafe TR positions, where a stall strands weight with nobody.  There
  the full ``(mover_gain, opponent_gain)`` pair is computed without
  pruning; the mover maximises its own gain, ties go to the lowest vertex.

Twin compression: vertices with equal weight and equal neighbourhoods
(apart from each other) are interchangeable, so inside every twin class the
taken members are normalised to the lowest indices and only the lowest
untaken member of a class is ever tried as a move.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Union

from .game import (
    GameState,
    Player,
    Ruleset,
    Scoring,
    Status,
    StrategyError,
    Variant,
    apply,
    is_terminal,
    legal_mask,
    winner,
)
from .graph_core import WeightedGraph, as_mask, bits, connected_mask, cut_mask, twin_classes

if TYPE_CHECKING:
    from .strategies import Strategy

DEFAULT_MEMO_CAP = 2**27
BRUTE_FORCE_LIMIT = 20


@dataclass
class SearchStats:
    expanded: int = 0
    memo_hits: int = 0
    peak_memo: int = 0

    def __str__(self) -> str:
        return f"expanded {self.expanded} memo_hits {self.memo_hits} peak_memo {self.peak_memo}"


class MemoCapacityError(MemoryError):
    def __init__(self, cap: int, stats: SearchStats):
        super().__init__(f"memo capacity {cap} exceeded ({stats})")
        self.cap = cap
        self.stats = stats


@dataclass
class SolveResult:
    ruleset: Ruleset
    alice_value: Optional[Fraction] = None
    bob_value: Optional[Fraction] = None
    winner: Optional[Player] = None
    principal_variation: list[int] = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)

    def alice_fraction(self, total: Fraction) -> Fraction:
        return self.alice_value / total if total else Fraction(0)


def _scale(weights) -> int:
    scale = 1
    for w in weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    return scale


class Solver:
    """Memoized exact searcher for one graph and ruleset.

    ``move_mask`` restricts which vertices may ever be taken (the game ends
    when no allowed vertex is legal); it is used to solve gadget-local
    subgames.
    """

    def __init__(
        self,
        G: WeightedGraph,
        ruleset: Ruleset,
        compress: bool = True,
        memo_cap: int = DEFAULT_MEMO_CAP,
        move_mask: Optional[int] = None,
    ):
        self.G = G
        self.ruleset = ruleset
        self.memo_cap = memo_cap
        self.stats = SearchStats()
        self.scale = _scale(G.weights)
        self.w = [int(x * self.scale) for x in G.weights]
        self.adj = G.adj_mask
        self.full = G.full_mask
        self.allowed = self.full if move_mask is None else move_mask & self.full
        self.needs_t = ruleset.needs_t
        self.needs_r = ruleset.needs_r
        self.misere = ruleset.scoring is Scoring.MISERE
        self.always_safe = ruleset.variant is not Variant.TR and self.allowed == self.full
        classes = []
        if compress:
            for c in twin_classes(G):
                m = c.mask
                if len(c) > 1 and m & self.allowed in (0, m):
                    classes.append(m)
        self.classes = classes
        self._prefix = []
        for c in classes:
            pre = [0]
            for v in bits(c):
                pre.append(pre[-1] | 1 << v)
            self._prefix.append(pre)
        self._bounds: dict[int, list] = {}
        self._pairs: dict[int, tuple[int, int, int]] = {}
        self._wins: dict[int, bool] = {}
        need = 4 * G.n + 1000
        if sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)

    # -- helpers ----------------------------------------------------------

    def canonical(self, taken: int) -> int:
        for c, pre in zip(self.classes, self._prefix):
            k = (taken & c).bit_count()
            taken = taken & ~c | pre[k]
        return taken

    def _frontier(self, taken: int) -> int:
        f = 0
        for v in bits(taken):
            f |= self.adj[v]
        return f

    def _moves(self, taken: int, frontier: int) -> int:
        rem = self.full & ~taken
        m = rem & self.allowed
        if self.needs_t and taken:
            m &= frontier
        if self.needs_r and m and rem.bit_count() > 2:
            m &= ~cut_mask(self.adj, rem)[0]
        for c in self.classes:
            x = m & c
            if x & (x - 1):
                m = m & ~c | x & -x
        return m

    def _is_safe(self, taken: int, frontier: int) -> bool:
        if self.always_safe:
            return True
        if self.allowed != self.full:
            return False
        return taken != 0 and (self.full & ~taken & ~frontier) == 0

    def _remw(self, taken: int) -> int:
        w = self.w
        return sum(w[v] for v in bits(self.full & ~taken))

    def _memo_size(self) -> int:
        return len(self._bounds) + len(self._pairs) + len(self._wins)

    def _note_insert(self) -> None:
        size = self._memo_size()
        if size >= self.memo_cap:
            raise MemoCapacityError(self.memo_cap, self.stats)
        if size + 1 > self.stats.peak_memo:
            self.stats.peak_memo = size + 1

    # -- constant-sum search ------------------------------------------------

    def _ab(self, taken: int, frontier: int, remw: int, alpha: int, beta: int) -> int:
        """Fail-soft alpha-beta on the mover's remaining gain."""
        if remw == 0:
            return 0
        entry = self._bounds.get(taken)
        if entry is not None:
            self.stats.memo_hits += 1
            lo, hi, hint = entry
            if lo >= beta:
                return lo
            if hi <= alpha:
                return hi
            if lo == hi:
                return lo
            if lo > alpha:
                alpha = lo
            if hi < beta:
                beta = hi
        else:
            lo, hi, hint = 0, remw, -1
        if alpha >= remw:
            return remw
        moves = self._moves(taken, frontier)
        self.stats.expanded += 1
        w = self.w
        if not moves:
            best, best_move = 0, -1
        else:
            order = sorted(bits(moves), key=lambda v: (-w[v], v))
            if hint >= 0 and moves >> hint & 1 and order[0] != hint:
                order.remove(hint)
                order.insert(0, hint)
            best, best_move = -1, -1
            a = alpha
            adj = self.adj
            for v in order:
                c = self._ab(taken | 1 << v, frontier | adj[v], remw - w[v], remw - beta, remw - a)
                val = remw - c
                if val > best:
                    best, best_move = val, v
                    if best > a:
                        a = best
                        if a >= beta:
                            break
        if best <= alpha:
            hi = min(hi, best)
        elif best >= beta:
            lo = max(lo, best)
        else:
            lo = hi = best
        if entry is None:
            self._note_insert()
            self._bounds[taken] = [lo, hi, best_move]
        else:
            entry[0], entry[1] = lo, hi
            if best_move >= 0:
                entry[2] = best_move
        return best

    def _exact(self, taken: int, frontier: int, remw: int) -> int:
        return self._ab(taken, frontier, remw, -1, remw + 1)

    # -- general (possibly stalling) search ---------------------------------

    def _pair(self, taken: int, frontier: int, remw: int) -> tuple[int, int]:
        if self._is_safe(taken, frontier):
            v = self._exact(taken, frontier, remw)
            return v, remw - v
        hit = self._pairs.get(taken)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit[0], hit[1]
        moves = self._moves(taken, frontier)
        self.stats.expanded += 1
        best = (0, 0, -1)
        w, adj = self.w, self.adj
        for v in sorted(bits(moves), key=lambda v: (-w[v], v)):
            after, f2 = taken | 1 << v, frontier | adj[v]
            if best[2] >= 0 and self._dominated(after, f2, remw - w[v], best[0] - w[v] - (v < best[2])):
                continue
            cm, co = self._pair(after, f2, remw - w[v])
            g = w[v] + co
            if best[2] < 0 or g > best[0] or g == best[0] and v < best[2]:
                best = (g, cm, v)
        self._note_insert()
        self._pairs[taken] = best
        return best[0], best[1]

    def _dominated(self, taken: int, frontier: int, remw: int, t: int) -> bool:
        """True when the player who just moved gains at most ``t`` more from here.

        The mover here gets at least its heaviest legal vertex, and if some
        reply leads to a safe position, the player who just moved gets at most
        its exact value there (the mover picks the reply best for itself).
        """
        if t < 0:
            return False
        w, adj = self.w, self.adj
        replies = sorted(bits(self._moves(taken, frontier)), key=lambda u: (-w[u], u))
        if remw - (w[replies[0]] if replies else 0) <= t:
            return True
        for u in replies[:3]:
            after, f2 = taken | 1 << u, frontier | adj[u]
            if self._is_safe(after, f2):
                return self._ab(after, f2, remw - w[u], t, t + 1) <= t
        return False

    # -- win/loss search ----------------------------------------------------

    def _win(self, taken: int, frontier: int) -> bool:
        hit = self._wins.get(taken)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        moves = self._moves(taken, frontier)
        self.stats.expanded += 1
        if not moves:
            result = self.misere
        else:
            result = False
            adj = self.adj
            for v in bits(moves):
                if not self._win(taken | 1 << v, frontier | adj[v]):
                    result = True
                    break
        self._note_insert()
        self._wins[taken] = result
        return result

    # -- public API ---------------------------------------------------------

    def gains(self, taken: Union[int, GameState]) -> tuple[Fraction, Fraction]:
        """Future ``(mover, opponent)`` gains from a position under optimal play."""
        taken = self._as_taken(taken)
        c = self.canonical(taken)
        frontier = self._frontier(c)
        remw = self._remw(c)
        m, o = self._pair(c, frontier, remw)
        return Fraction(m, self.scale), Fraction(o, self.scale)

    def mover_wins(self, taken: Union[int, GameState]) -> bool:
        c = self.canonical(self._as_taken(taken))
        return self._win(c, self._frontier(c))

    def _as_taken(self, taken) -> int:
        if isinstance(taken, GameState):
            return taken.taken.mask
        return as_mask(taken) if not isinstance(taken, int) else taken

    def _actual_moves(self, taken: int) -> list[int]:
        """Legal moves of a (not necessarily canonical) position, one per twin class."""
        moves = self._moves(taken, self._frontier(taken))
        return list(bits(moves))

    def best_move(self, taken: Union[int, GameState]) -> Optional[int]:
        """Lowest-index optimal move, or None when no move is legal."""
        taken = self._as_taken(taken)
        moves = self._actual_moves(taken)
        if not moves:
            return None
        if self.ruleset.scoring is not Scoring.WEIGHT:
            if self.mover_wins(taken):
                for v in moves:
                    if not self.mover_wins(taken | 1 << v):
                        return v
                raise AssertionError("winning position without a winning move")
            return moves[0]
        c = self.canonical(taken)
        frontier = self._frontier(c)
        remw = self._remw(c)
        if self._is_safe(c, frontier):
            target = remw - self._exact(c, frontier, remw)
            for v in moves:
                child = self.canonical(taken | 1 << v)
                cw = remw - self.w[v]
                if self._ab(child, self._frontier(child), cw, target, target + 1) <= target:
                    return v
            raise AssertionError("no move attains the position value")
        best_gain = self._pair(c, frontier, remw)[0]
        for v in moves:
            child = self.canonical(taken | 1 << v)
            cw = remw - self.w[v]
            if self.w[v] + self._pair(child, self._frontier(child), cw)[1] == best_gain:
                return v
        raise AssertionError("no move attains the position value")

    def principal_variation(self, taken: int = 0) -> list[int]:
        line = []
        while True:
            v = self.best_move(taken)
            if v is None:
                return line
            line.append(v)
            taken |= 1 << v

    def solve(self) -> SolveResult:
        result = SolveResult(self.ruleset, stats=self.stats)
        if self.ruleset.scoring is Scoring.WEIGHT:
            a, b = self.gains(0)
            result.alice_value, result.bob_value = a, b
        else:
            result.winner = Player.ALICE if self.mover_wins(0) else Player.BOB
        result.principal_variation = self.principal_variation()
        return result


def solve_weight(G: WeightedGraph, ruleset: Ruleset, **kwargs) -> SolveResult:
    if ruleset.scoring is not Scoring.WEIGHT:
        raise ValueError("solve_weight needs weight scoring")
    if not connected_mask(G.adj_mask, G.full_mask):
        raise ValueError("graph must be connected")
    return Solver(G, ruleset, **kwargs).solve()


def solve_win(G: WeightedGraph, ruleset: Ruleset, **kwargs) -> SolveResult:
    if ruleset.scoring is Scoring.WEIGHT:
        raise ValueError("solve_win needs canonical or misere scoring")
    return Solver(G, ruleset, **kwargs).solve()


def solve(G: WeightedGraph, ruleset: Ruleset, **kwargs) -> SolveResult:
    if ruleset.scoring is Scoring.WEIGHT:
        return solve_weight(G, ruleset, **kwargs)
    return solve_win(G, ruleset, **kwargs)


def solve_parallel(G: WeightedGraph, ruleset: Ruleset, threads: int, **kwargs) -> SolveResult:
    """Solve with the root moves distributed over worker processes.

    Each worker solves one root child independently; the combination uses
    the same tie-break as the sequential search, so results are identical.
    """
    from concurrent.futures import ProcessPoolExecutor

    root = Solver(G, ruleset, **kwargs)
    moves = root._actual_moves(0)
    if threads <= 1 or len(moves) <= 1:
        return root.solve()
    with ProcessPoolExecutor(max_workers=threads) as pool:
        children = list(pool.map(_child_value, [(G, ruleset, kwargs, v) for v in moves]))
    result = SolveResult(ruleset, stats=root.stats)
    if ruleset.scoring is Scoring.WEIGHT:
        best = None
        for v, (m, o) in zip(moves, children):
            g = G.weights[v] + o
            if best is None or g > best[0]:
                best = (g, m, v)
        result.alice_value, result.bob_value = best[0], best[1]
        first = best[2]
    else:
        wins = [v for v, child_wins in zip(moves, children) if not child_wins]
        result.winner = Player.ALICE if wins else Player.BOB
        first = wins[0] if wins else moves[0]
    result.principal_variation = [first] + root.principal_variation(1 << first)
    return result


def _child_value(args):
    G, ruleset, kwargs, v = args
    s = Solver(G, ruleset, **kwargs)
    if ruleset.scoring is Scoring.WEIGHT:
        return s.gains(1 << v)
    return s.mover_wins(1 << v)


# ---------------------------------------------------------------------------
# reference oracle

def brute_force_value(G: WeightedGraph, ruleset: Ruleset) -> SolveResult:
    """Plain recursion over every line of play: no memo, no twins, no pruning.

    Legality is tested from the definitions (connectivity of the taken and
    remaining sets after the move), independently of the cut-vertex code.
    """
    if G.n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} vertices (n={G.n})")
    adj, full = G.adj_mask, G.full_mask
    weights = G.weights
    stats = SearchStats()

    def moves(taken: int) -> list[int]:
        out = []
        for v in bits(full & ~taken):
            after = taken | 1 << v
            if ruleset.needs_t and not connected_mask(adj, after):
                continue
            if ruleset.needs_r and not connected_mask(adj, full & ~after):
                continue
            out.append(v)
        return out

    def pair(taken: int) -> tuple[Fraction, Fraction, list[int]]:
        stats.expanded += 1
        best = None
        for v in moves(taken):
            cm, co, line = pair(taken | 1 << v)
            g = weights[v] + co
            if best is None or g > best[0]:
                best = (g, cm, [v] + line)
        return best if best is not None else (Fraction(0), Fraction(0), [])

    def win(taken: int) -> tuple[bool, list[int]]:
        stats.expanded += 1
        options = moves(taken)
        if not options:
            return ruleset.scoring is Scoring.MISERE, []
        fallback = None
        for v in options:
            child_wins, line = win(taken | 1 << v)
            if not child_wins:
                return True, [v] + line
            if fallback is None:
                fallback = [v] + line
        return False, fallback

    result = SolveResult(ruleset, stats=stats)
    if ruleset.scoring is Scoring.WEIGHT:
        a, b, line = pair(0)
        result.alice_value, result.bob_value, result.principal_variation = a, b, line
    else:
        alice_wins, line = win(0)
        result.winner = Player.ALICE if alice_wins else Player.BOB
        result.principal_variation = line
    return result


# ---------------------------------------------------------------------------
# best response against a fixed strategy

def best_response(
    G: WeightedGraph,
    ruleset: Ruleset,
    fixed: "Strategy",
    fixed_player: Player = Player.BOB,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> SolveResult:
    """Exact optimum of the free player against a deterministic fixed policy.

    The fixed strategy must be deterministic given the position and its
    ``memory_key()``; positions are memoized on both.  For weight scoring
    the free player maximises its own gain (ties to the lowest vertex); for
    win scoring it looks for any winning line.
    """
    free = fixed_player.other
    stats = SearchStats()
    memo: dict[tuple, tuple] = {}
    weight_game = ruleset.scoring is Scoring.WEIGHT
    fixed.reset(0)
    tracing, fixed.tracing = fixed.tracing, False
    need = 4 * G.n + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)

    def fixed_move(state: GameState) -> int:
        v = fixed.choose(state)
        if not legal_mask(G, ruleset, state.taken.mask) >> v & 1:
            raise StrategyError(f"{fixed.name} chose illegal vertex {v}", state)
        return v

    def rec(state: GameState) -> tuple:
        """Returns (free_value, fixed_gain, move) for the rest of the game."""
        key = (state.taken.mask, fixed.memory_key())
        hit = memo.get(key)
        if hit is not None:
            stats.memo_hits += 1
            return hit
        stats.expanded += 1
        if is_terminal(state) is not Status.ONGOING:
            if weight_game:
                out = (Fraction(0), Fraction(0), None)
            else:
                out = (1 if winner(state) is free else 0, 0, None)
        elif state.to_move is fixed_player:
            v = fixed_move(state)
            after = apply(state, v)
            snap = fixed.snapshot()
            fixed.observe(state, v, after)
            f, x, _ = rec(after)
            fixed.restore(snap)
            out = (f, x + G.weights[v] if weight_game else 0, v)
        else:
            out = None
            for v in bits(legal_mask(G, ruleset, state.taken.mask)):
                after = apply(state, v)
                snap = fixed.snapshot()
                fixed.observe(state, v, after)
                f, x, _ = rec(after)
                fixed.restore(snap)
                g = f + G.weights[v] if weight_game else f
                if out is None or g > out[0]:
                    out = (g, x, v)
                    if not weight_game and g == 1:
                        break
        if len(memo) >= memo_cap:
            raise MemoCapacityError(memo_cap, stats)
        memo[key] = out
        stats.peak_memo = max(stats.peak_memo, len(memo))
        return out

    try:
        root = GameState.initial(G, ruleset)
        value = rec(root)
        # walk the optimal line again to recover it from the memo
        line = []
        state = root
        while True:
            _, _, v = memo[(state.taken.mask, fixed.memory_key())]
            if v is None:
                break
            after = apply(state, v)
            fixed.observe(state, v, after)
            line.append(v)
            state = after
    finally:
        fixed.tracing = tracing
        fixed.reset(0)
    result = SolveResult(ruleset, principal_variation=line, stats=stats)
    if weight_game:
        result.alice_value, result.bob_value = state.alice_gain, state.bob_gain
        assert (value[0] if free is Player.ALICE else value[1]) == result.alice_value
    else:
        result.winner = winner(state)
    return result
