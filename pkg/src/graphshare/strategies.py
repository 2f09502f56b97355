"""Move policies: baselines plus Bob's rule-based strategies from the constructions.

A strategy sees the current :class:`GameState` and its own memory.  Memory
must be immutable (tuples, frozensets, ints) so that ``snapshot`` and
``restore`` are cheap; exhaustive drivers such as ``best_response`` rely on
that.  Every rule-based strategy records which numbered rule fired in ``trace``
and raises :class:`StrategyError` when no rule applies.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .game import (
    GameState,
    Player,
    Ruleset,
    Status,
    StrategyError,
    apply,
    is_terminal,
    legal_mask,
    simulate,
)
from .graph_core import WeightedGraph, bits, cut_mask, reach_mask


class ViewError(StrategyError):
    pass


class Strategy:
    name = "strategy"

    def __init__(self):
        self.tracing = True
        self.reset(0)

    def reset(self, seed: int = 0) -> None:
        self.memory = self.initial_memory()
        self.trace: list[dict] = []

    def initial_memory(self):
        return None

    def choose(self, state: GameState) -> int:
        raise NotImplementedError

    def observe(self, prev: GameState, v: int, after: GameState) -> None:
        """Called after every move, by either player."""

    def memory_key(self):
        """The part of the memory that can influence future choices."""
        return self.memory

    def snapshot(self):
        return self.memory, len(self.trace)

    def restore(self, snap) -> None:
        self.memory, k = snap
        del self.trace[k:]

    def record(self, **entry) -> None:
        if self.tracing:
            self.trace.append(entry)

    def _legal(self, state: GameState) -> int:
        return legal_mask(state.graph, state.ruleset, state.taken.mask)


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# ---------------------------------------------------------------------------
# baselines

class GreedyStrategy(Strategy):
    """Heaviest legal vertex, lowest index on ties."""

    name = "greedy"

    def choose(self, state):
        G = state.graph
        v = max(bits(self._legal(state)), key=lambda u: (G.weights[u], -u))
        self.record(turn=len(state.taken) + 1, rule="greedy", vertex=v)
        return v


class RandomStrategy(Strategy):
    """Uniform legal vertex.  The stream depends on the constructor seed and the reset seed."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        super().__init__()

    def reset(self, seed: int = 0) -> None:
        super().reset(seed)
        self.rng = random.Random(f"{self.seed}:{seed}")

    def choose(self, state):
        v = self.rng.choice(list(bits(self._legal(state))))
        self.record(turn=len(state.taken) + 1, rule="random", vertex=v)
        return v


class OptimalStrategy(Strategy):
    """Perfect play backed by the exact solver (built lazily per graph)."""

    name = "optimal"

    def __init__(self, solver=None):
        self.solver = solver
        super().__init__()

    def choose(self, state):
        from .solver import Solver

        s = self.solver
        if s is None or s.G is not state.graph or s.ruleset != state.ruleset:
            s = self.solver = Solver(state.graph, state.ruleset)
        v = s.best_move(state.taken.mask)
        self.record(turn=len(state.taken) + 1, rule="optimal", vertex=v)
        return v


class ScriptedStrategy(Strategy):
    """Plays a fixed list of vertices; used to replay a known line through ``simulate``."""

    name = "scripted"

    def __init__(self, moves: Sequence[int]):
        self.moves = list(moves)
        super().__init__()

    def initial_memory(self):
        return 0

    def choose(self, state):
        if self.memory >= len(self.moves):
            raise StrategyError("scripted strategy ran out of moves", state)
        v = self.moves[self.memory]
        self.memory += 1
        return v


def greedy_strategy() -> Strategy:
    return GreedyStrategy()


def random_strategy(seed: int = 0) -> Strategy:
    return RandomStrategy(seed)


def optimal_strategy(solver=None) -> Strategy:
    return OptimalStrategy(solver)


def _roles(G: WeightedGraph, expected: Sequence[str]) -> list[str]:
    roles = []
    for v, lab in enumerate(G.labels):
        role = (lab or "").split(":", 1)[0]
        if role not in expected:
            raise StrategyError(f"vertex {v} has label {lab!r}; expected one of {', '.join(expected)}")
        roles.append(role)
    return roles


# ---------------------------------------------------------------------------
# clique cycle (games T and TR)

class BobCliqueCycle(Strategy):
    """1) an available weight-1 vertex; 2) an available vertex of an already touched clique."""

    name = "bob-clique-cycle"

    def __init__(self):
        self._cache = None
        super().__init__()

    def _blocks(self, G):
        if self._cache is None or self._cache[0] is not G:
            _roles(G, ("block",))
            block_of = [int(lab.split(":")[1]) for lab in G.labels]
            masks = {}
            for v, b in enumerate(block_of):
                masks[b] = masks.get(b, 0) | 1 << v
            self._cache = (G, block_of, masks)
        return self._cache[1], self._cache[2]

    def choose(self, state):
        G = state.graph
        block_of, masks = self._blocks(G)
        legal = self._legal(state)
        turn = len(state.taken) + 1
        heavy = [v for v in bits(legal) if G.weights[v] > 0]
        if heavy:
            self.record(turn=turn, rule=1, vertex=heavy[0])
            return heavy[0]
        taken = state.taken.mask
        for v in bits(legal):
            if masks[block_of[v]] & taken:
                self.record(turn=turn, rule=2, vertex=v)
                return v
        raise StrategyError("bob_clique_cycle: no rule applies", state)

    def memory_key(self):
        return None


# ---------------------------------------------------------------------------
# X/Y/Z graph (game R)

class BobXYZ(Strategy):
    """1) an available vertex of Y; 2) an available non-leaf of Z, or a leaf of Z whose
    Y-neighbour has another leaf of Z; 3) an available vertex of X.

    Memory is ``(phase, a, b)`` where a and b count the Y vertices taken by
    Alice and Bob during phase 1.  The phase is the highest rule used so far.
    """

    name = "bob-xyz"

    def __init__(self):
        self._cache = None
        super().__init__()

    def initial_memory(self):
        return (1, 0, 0)

    def _role_masks(self, G):
        if self._cache is None or self._cache[0] is not G:
            roles = _roles(G, ("X", "Y", "Z"))
            masks = {r: sum(1 << v for v in range(G.n) if roles[v] == r) for r in "XYZ"}
            self._cache = (G, masks)
        return self._cache[1]

    def choose(self, state):
        G = state.graph
        m = self._role_masks(G)
        legal = self._legal(state)
        rem = G.full_mask & ~state.taken.mask
        turn = len(state.taken) + 1
        rule, v = None, None
        if legal & m["Y"]:
            rule, v = 1, _lowest(legal & m["Y"])
        else:
            adj = G.adj_mask
            leaves = [z for z in bits(rem & m["Z"]) if (adj[z] & rem).bit_count() == 1]
            leaf_mask = sum(1 << z for z in leaves)
            for z in bits(legal & m["Z"]):
                if not leaf_mask >> z & 1:
                    rule, v = 2, z
                    break
                y = _lowest(adj[z] & rem)
                if adj[y] & leaf_mask & ~(1 << z):
                    rule, v = 2, z
                    break
            if v is None and legal & m["X"]:
                rule, v = 3, _lowest(legal & m["X"])
        if v is None:
            raise StrategyError("bob_xyz: no rule applies", state)
        phase, a, b = self.memory
        if rule > phase:
            if phase == 1:
                self.record(turn=turn, event="phase1_end", a=a, b=b)
            phase = rule
            self.memory = (phase, a, b)
        self.record(turn=turn, rule=rule, phase=phase, vertex=v)
        return v

    def observe(self, prev, v, after):
        phase, a, b = self.memory
        if phase == 1 and self._role_masks(prev.graph)["Y"] >> v & 1:
            if prev.to_move is Player.ALICE:
                a += 1
            else:
                b += 1
            self.memory = (phase, a, b)
        if self.tracing and prev.to_move is Player.ALICE:
            self.trace.append({"turn": len(prev.taken) + 1, "alice": v, "weight": prev.graph.weights[v], "phase": phase})

    def memory_key(self):
        return None


# ---------------------------------------------------------------------------
# clique with subset leaves (game R)

class BobGnk(Strategy):
    """1) an available weight-1 vertex; 2) an available weight-0 vertex that is not
    the only leaf hanging at some weight-1 vertex."""

    name = "bob-gnk"

    def choose(self, state):
        G = state.graph
        legal = self._legal(state)
        turn = len(state.taken) + 1
        heavy = [v for v in bits(legal) if G.weights[v] > 0]
        if heavy:
            self.record(turn=turn, rule=1, vertex=heavy[0])
            return heavy[0]
        rem = G.full_mask & ~state.taken.mask
        adj = G.adj_mask
        leaf_count: dict[int, int] = {}
        leaf_at = {}
        for u in bits(rem):
            if G.weights[u] == 0 and (adj[u] & rem).bit_count() == 1:
                a = _lowest(adj[u] & rem)
                leaf_count[a] = leaf_count.get(a, 0) + 1
                leaf_at[u] = a
        for u in bits(legal):
            if G.weights[u] != 0:
                continue
            a = leaf_at.get(u)
            if a is not None and G.weights[a] > 0 and leaf_count[a] == 1:
                continue
            self.record(turn=turn, rule=2, vertex=u)
            return u
        raise StrategyError("bob_gnk: no rule applies (invariant violated)", state)

    def observe(self, prev, v, after):
        if self.tracing and prev.to_move is Player.BOB:
            G = after.graph
            legal = legal_mask(G, after.ruleset, after.taken.mask)
            heavy = [u for u in bits(legal) if G.weights[u] > 0]
            self.trace.append({
                "turn": len(prev.taken) + 1,
                "event": "after_bob",
                "w1_available": heavy,
                "remaining": G.n - len(after.taken),
            })

    def memory_key(self):
        return None


# ---------------------------------------------------------------------------
# H plus one leaf per vertex (game R)

@dataclass(frozen=True)
class ExpanderView:
    """Bookkeeping for Bob's strategy on a graph H with a pendant leaf at every vertex."""

    exposed: int
    h_remaining: int
    B: int
    components: tuple[int, ...]
    L: int
    B_L: int
    S: int
    dangerous: int
    threshold: int

    def as_sets(self) -> dict[str, list[int]]:
        return {
            name: list(bits(getattr(self, name)))
            for name in ("exposed", "h_remaining", "B", "L", "B_L", "S", "dangerous")
        }


@dataclass(frozen=True)
class LeafyShape:
    h_mask: int
    leaf_of: tuple[int, ...]  # H vertex -> its leaf (-1 for leaves)
    host_of: tuple[int, ...]  # leaf -> its H vertex (-1 for H vertices)

    @classmethod
    def of(cls, G: WeightedGraph) -> "LeafyShape":
        leaf_of = [-1] * G.n
        host_of = [-1] * G.n
        for u in range(G.n):
            if G.weights[u] == 0 and G.degree(u) == 1:
                h = next(iter(G.adj[u]))
                if G.weights[h] == 0 and G.degree(h) == 1:
                    # a lone edge: call the lower end the host
                    if u < h:
                        continue
                if leaf_of[h] != -1:
                    raise ViewError(f"vertex {h} has more than one pendant leaf")
                leaf_of[h] = u
                host_of[u] = h
        h_mask = 0
        for v in range(G.n):
            if host_of[v] == -1:
                if leaf_of[v] == -1:
                    raise ViewError(f"vertex {v} is neither a leaf nor carries one")
                h_mask |= 1 << v
        return cls(h_mask, tuple(leaf_of), tuple(host_of))


def _components(adj, mask: int) -> list[int]:
    out = []
    while mask:
        c = reach_mask(adj, mask, _lowest(mask))
        out.append(c)
        mask &= ~c
    return out


def compute_view(G: WeightedGraph, shape: LeafyShape, taken: int, threshold: int, ruleset: Ruleset) -> ExpanderView:
    """The view recomputed from scratch."""
    exposed = 0
    for v in bits(shape.h_mask & ~taken):
        if taken >> shape.leaf_of[v] & 1:
            exposed |= 1 << v
    return _finish_view(G, shape, taken, shape.h_mask & ~taken, exposed, threshold, ruleset)


def advance_view(G: WeightedGraph, shape: LeafyShape, view: ExpanderView, taken: int, v: int, ruleset: Ruleset) -> ExpanderView:
    """The view after vertex ``v`` is taken, updating H_R and the exposed set incrementally."""
    h_rem = view.h_remaining & ~(1 << v)
    exposed = view.exposed & ~(1 << v)
    host = shape.host_of[v]
    if host >= 0 and h_rem >> host & 1:
        exposed |= 1 << host
    return _finish_view(G, shape, taken, h_rem, exposed, view.threshold, ruleset)


def _finish_view(G, shape, taken, h_rem, exposed, threshold, ruleset) -> ExpanderView:
    adj = G.adj_mask
    cuts, _ = cut_mask(adj, h_rem) if h_rem else (0, 0)
    B = exposed & cuts
    comps = tuple(_components(adj, h_rem & ~B))
    large = [c for c in comps if c.bit_count() >= threshold]
    if len(large) > 1:
        raise ViewError(f"{len(large)} large components (threshold {threshold})")
    L = large[0] if large else 0
    B_L = 0
    for b in bits(B):
        if adj[b] & L:
            B_L |= 1 << b
    S = h_rem & ~L & ~B_L
    dangerous = 0
    if B_L:
        legal = legal_mask(G, ruleset, taken)
        for u in bits(legal):
            after = legal_mask(G, ruleset, taken | 1 << u)
            if after & B_L:
                dangerous |= 1 << u
    return ExpanderView(exposed, h_rem, B, comps, L, B_L, S, dangerous, threshold)


class BobExpander(Strategy):
    """Bob's three rules on H with pendant leaves.

    1) if Alice just took the leaf of some v in L, take v when available;
    2) if Alice just made a vertex of B_L available, take it;
    3) otherwise an available vertex outside L, not a leaf of L and not dangerous.

    Rules 1 and 2 look at the view before Alice's move, rule 3 at the current
    one.  When there is no large component rule 3 still skips dangerous
    vertices (there are none then, since B_L is empty).  Memory holds the
    views before and after the last move, and that move.
    """

    name = "bob-expander"

    def __init__(self, threshold: int):
        self.threshold = threshold
        self._shape = None
        super().__init__()

    def shape(self, G):
        if self._shape is None or self._shape[0] is not G:
            self._shape = (G, LeafyShape.of(G))
        return self._shape[1]

    def initial_memory(self):
        return (None, None, None)

    def current_view(self, state: GameState) -> ExpanderView:
        prev, cur, last = self.memory
        if cur is None:
            cur = compute_view(state.graph, self.shape(state.graph), state.taken.mask, self.threshold, state.ruleset)
            self.memory = (prev, cur, last)
        return cur

    def observe(self, prev_state, v, after):
        G = after.graph
        shape = self.shape(G)
        cur = self.current_view(prev_state)
        nxt = advance_view(G, shape, cur, after.taken.mask, v, after.ruleset)
        self.memory = (cur, nxt, v)
        if not self.tracing:
            return
        if prev_state.to_move is Player.ALICE:
            self.trace.append({
                "turn": len(prev_state.taken) + 1,
                "alice": v,
                "weight": G.weights[v],
                "in_L": bool(cur.L >> v & 1),
                "in_B_L": bool(cur.B_L >> v & 1),
                "remaining_before": G.n - len(prev_state.taken),
            })
        else:
            self.trace.append({
                "turn": len(prev_state.taken) + 1,
                "event": "after_bob",
                "L": nxt.L,
                "B_L": nxt.B_L,
                "S": nxt.S,
                "exposed_in_L": nxt.exposed & nxt.L,
            })

    def choose(self, state):
        G = state.graph
        shape = self.shape(G)
        legal = self._legal(state)
        turn = len(state.taken) + 1
        cur = self.current_view(state)
        before, _, last = self.memory
        if before is not None:
            host = shape.host_of[last]
            if host >= 0 and before.L >> host & 1 and legal >> host & 1:
                self.record(turn=turn, rule=1, vertex=host)
                return host
            freed = before.B_L & legal
            if freed:
                v = _lowest(freed)
                self.record(turn=turn, rule=2, vertex=v)
                return v
        near_L = 0
        for h in bits(cur.L):
            near_L |= 1 << shape.leaf_of[h]
        options = legal & ~cur.L & ~near_L & ~cur.dangerous
        if options:
            v = _lowest(options)
            self.record(turn=turn, rule=3, vertex=v, large=bool(cur.L))
            return v
        raise ViewError("bob_expander: no rule applies", state)

    def memory_key(self):
        # rules 1 and 2 read the previous view and the last move; the current view follows from the position
        before, _, last = self.memory
        return None if before is None else (before.L, before.B_L, last)


def bob_clique_cycle() -> Strategy:
    return BobCliqueCycle()


def bob_xyz() -> Strategy:
    return BobXYZ()


def bob_gnk() -> Strategy:
    return BobGnk()


def bob_expander(threshold: int) -> Strategy:
    return BobExpander(threshold)


STRATEGY_NAMES = ("greedy", "random", "optimal", "bob-clique-cycle", "bob-xyz", "bob-gnk", "bob-expander")


def make_strategy(name: str, seed: int = 0, threshold: int = 1) -> Strategy:
    factories: dict[str, Callable[[], Strategy]] = {
        "greedy": GreedyStrategy,
        "random": lambda: RandomStrategy(seed),
        "optimal": OptimalStrategy,
        "bob-clique-cycle": BobCliqueCycle,
        "bob-xyz": BobXYZ,
        "bob-gnk": BobGnk,
        "bob-expander": lambda: BobExpander(threshold),
    }
    try:
        return factories[name]()
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; expected one of {', '.join(STRATEGY_NAMES)}") from None


# ---------------------------------------------------------------------------
# totality

@dataclass
class TotalityReport:
    games: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_totality(
    strategy: Strategy,
    G: WeightedGraph,
    ruleset: Ruleset,
    opponent_pool: Sequence,
    trials: int = 1,
    player: Player = Player.BOB,
    seed: int = 0,
    max_games: int = 10**6,
) -> TotalityReport:
    """Play the strategy against every opponent and collect positions where it had no move.

    An opponent is a :class:`Strategy` (played ``trials`` times with seeds
    ``seed, seed+1, ...``) or the string ``"exhaustive"``, which explores
    every choice of the opponent.
    """
    report = TotalityReport()
    for opp in opponent_pool:
        if opp == "exhaustive":
            _exhaustive(strategy, G, ruleset, player, report, max_games)
            continue
        for t in range(trials):
            pair = (strategy, opp) if player is Player.ALICE else (opp, strategy)
            try:
                simulate(G, ruleset, *pair, seed=seed + t)
                report.games += 1
            except StrategyError as e:
                report.games += 1
                report.failures.append({
                    "opponent": opp.name,
                    "seed": seed + t,
                    "error": str(e),
                    "taken": None if e.state is None else list(e.state.history),
                })
    return report


def _exhaustive(strategy, G, ruleset, player, report, max_games):
    strategy.reset(0)

    def rec(state):
        if report.games >= max_games:
            return
        if is_terminal(state) is not Status.ONGOING:
            report.games += 1
            return
        snap = strategy.snapshot()
        if state.to_move is player:
            try:
                v = strategy.choose(state)
            except StrategyError as e:
                report.games += 1
                report.failures.append({"opponent": "exhaustive", "error": str(e), "taken": list(state.history)})
                strategy.restore(snap)
                return
            if not legal_mask(G, ruleset, state.taken.mask) >> v & 1:
                report.games += 1
                report.failures.append({"opponent": "exhaustive", "error": f"illegal vertex {v}", "taken": list(state.history)})
                strategy.restore(snap)
                return
            after = apply(state, v)
            strategy.observe(state, v, after)
            rec(after)
        else:
            for v in bits(legal_mask(G, ruleset, state.taken.mask)):
                after = apply(state, v)
                strategy.observe(state, v, after)
                rec(after)
                strategy.restore(snap)
        strategy.restore(snap)

    rec(GameState.initial(G, ruleset))
