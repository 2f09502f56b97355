"""Graph families used by the unfairness results, and small extremal searches."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .game import T, Ruleset
from .graph_core import (
    BicliqueResult,
    GraphError,
    WeightedGraph,
    bits,
    complement_biclique_exists,
    connected_mask,
    cycle_graph,
    girth,
    path_graph,
    reach_mask,
    shortest_cycle,
)

Weight = Union[int, Fraction]


def pizza_cycle(weights: Sequence[Weight]) -> WeightedGraph:
    """A cycle carrying the given weights in order (the pizza)."""
    if len(weights) < 3:
        raise GraphError("a pizza needs at least 3 slices")
    return cycle_graph(weights)


def clique_cycle(k: int, blocks: int) -> WeightedGraph:
    """Even cycle of cliques of size 2*ceil(k/4), adjacent cliques fully joined.

    The lowest vertex of every even-numbered clique has weight 1.
    """
    if k < 2:
        raise GraphError("clique_cycle needs k >= 2")
    if blocks < 4 or blocks % 2:
        raise GraphError("clique_cycle needs an even number of blocks, at least 4")
    s = 2 * math.ceil(k / 4)
    n = blocks * s
    edges = []
    for b in range(blocks):
        here = range(b * s, b * s + s)
        there = range((b + 1) % blocks * s, (b + 1) % blocks * s + s)
        edges += itertools.combinations(here, 2)
        edges += itertools.product(here, there)
    weights = [1 if v % s == 0 and (v // s) % 2 == 0 else 0 for v in range(n)]
    labels = [f"block:{v // s}" for v in range(n)]
    G = WeightedGraph(n, edges, weights, labels)
    assert G.n % 2 == 0 and G.total_weight == blocks // 2
    return G


def xyz_graph(k: int, m: int) -> WeightedGraph:
    """Bipartite graph on X, Y, Z: X complete to Y, each z joined to its k-subset of Y.

    Vertex order is X, then Y (weight 1), then Z in lexicographic subset order.
    """
    if k < 1:
        raise GraphError("xyz_graph needs k >= 1")
    if m < k + 2:
        raise GraphError(f"xyz_graph needs m >= k + 2 (k={k}, m={m})")
    subsets = list(itertools.combinations(range(m), k))
    # |X| = |Y| + |Z| + 2 or + 3, whichever makes the total odd
    nx_ = m + len(subsets) + 2
    if (nx_ + m + len(subsets)) % 2 == 0:
        nx_ += 1
    y0 = nx_
    z0 = nx_ + m
    n = z0 + len(subsets)
    edges = [(x, y0 + y) for x in range(nx_) for y in range(m)]
    for i, S in enumerate(subsets):
        edges += [(z0 + i, y0 + y) for y in S]
    weights = [0] * nx_ + [1] * m + [0] * len(subsets)
    labels = (
        [f"X:{i}" for i in range(nx_)]
        + [f"Y:{i}" for i in range(m)]
        + ["Z:" + ",".join(map(str, S)) for S in subsets]
    )
    G = WeightedGraph(n, edges, weights, labels)
    assert G.n % 2 == 1
    return G


HNK_LIMIT = 12


def hnk_graph(n: int, k: int) -> WeightedGraph:
    """Blow-up of the subset graph: weight-0 vertices become (2k+1)-cliques.

    Vertices a_i (weight 1) come first, then the b_i cliques, then one clique
    per non-empty subset S of {1..n} in order of the subset bit mask.
    """
    if n < 1 or k < 0:
        raise GraphError("hnk_graph needs n >= 1 and k >= 0")
    if n > HNK_LIMIT:
        raise GraphError(f"hnk_graph limited to n <= {HNK_LIMIT}")
    s = 2 * k + 1
    labels = [f"a:{i + 1}" for i in range(n)]
    b_block = []
    for i in range(n):
        b_block.append(range(len(labels), len(labels) + s))
        labels += [f"b:{i + 1}:{j}" for j in range(s)]
    c_block = {}
    for S in range(1, 2**n):
        c_block[S] = range(len(labels), len(labels) + s)
        name = ",".join(str(i + 1) for i in range(n) if S >> i & 1)
        labels += [f"c:{name}:{j}" for j in range(s)]
    edges = []
    for block in list(b_block) + list(c_block.values()):
        edges += itertools.combinations(block, 2)
    for i in range(n):
        edges += [(i, v) for v in b_block[i]]
    for S, block in c_block.items():
        for i in range(n):
            if S >> i & 1:
                edges += itertools.product(block, b_block[i])
    weights = [1] * n + [0] * (len(labels) - n)
    G = WeightedGraph(len(labels), edges, weights, labels)
    assert G.n == n + s * (n + 2**n - 1) and G.n % 2 == 1
    return G


def gnk_graph(n: int, k: int) -> WeightedGraph:
    """Clique a_1..a_n of weight 1 plus a weight-0 vertex b_S for every k-subset S."""
    if not n > k >= 1:
        raise GraphError(f"gnk_graph needs n > k >= 1 (n={n}, k={k})")
    subsets = list(itertools.combinations(range(n), k))
    if (n + len(subsets)) % 2:
        raise GraphError(f"gnk_graph({n},{k}) has {n + len(subsets)} vertices; the count must be even")
    edges = list(itertools.combinations(range(n), 2))
    for i, S in enumerate(subsets):
        edges += [(n + i, a) for a in S]
    labels = [f"a:{i}" for i in range(n)] + ["b:" + ",".join(map(str, S)) for S in subsets]
    return WeightedGraph(n + len(subsets), edges, [1] * n + [0] * len(subsets), labels)


def centered_path(t: int) -> WeightedGraph:
    """Path on 2t+1 vertices with weight 1 on the centre only."""
    if t < 1:
        raise GraphError("centered_path needs t >= 1")
    return path_graph([1 if i == t else 0 for i in range(2 * t + 1)])


# ---------------------------------------------------------------------------
# sparse expanders with leaves

@dataclass(frozen=True)
class ExpanderParams:
    epsilon: float
    n: int
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.n < 3:
            raise ValueError("n must be at least 3")

    @property
    def c(self) -> float:
        return 2 * math.log(3 * math.e / self.epsilon) / self.epsilon

    @property
    def c_prime(self) -> float:
        return 1 / (2 * math.log(3 * self.c))

    @property
    def girth_threshold(self) -> float:
        return self.c_prime * math.log(self.n)

    @property
    def degree_bound(self) -> float:
        return 9 * self.c

    @property
    def threshold(self) -> int:
        return math.ceil(self.epsilon * self.n)


class GenerationError(RuntimeError):
    pass


@dataclass
class ExpanderReport:
    sampled_vertices: int
    sampled_edges: int
    removed_for_cycles: int
    removed_for_degree: int
    removed_extra: int
    connecting_edges: int
    girth: Union[int, float]
    girth_threshold: float
    max_degree: int
    degree_bound: float
    connected: bool
    biclique_eps: BicliqueResult
    biclique_two: BicliqueResult

    @property
    def girth_ok(self) -> bool:
        return self.girth >= self.girth_threshold

    @property
    def degree_ok(self) -> bool:
        return self.max_degree <= self.degree_bound + 1


def leafy_expander(params: ExpanderParams, biclique_budget: int = 10**7) -> tuple[WeightedGraph, WeightedGraph, ExpanderReport]:
    """Sample G(3n, c/n), prune to n vertices, connect, and attach a leaf to each vertex.

    Pruning removes the lowest vertex of every cycle shorter than the girth
    threshold, then vertices of degree above 9c, then the lowest remaining
    vertices until n are left.  Components are then joined by single edges
    between minimum-degree endpoints.  Returns ``(H, G, report)``: ``H`` has
    all weights 1 and ``G`` is ``H`` with a weight-0 leaf on every vertex.
    """
    n = params.n
    rng = random.Random(params.seed)
    p = min(1.0, params.c / n)
    big = 3 * n
    adj = [0] * big
    sampled_edges = 0
    for u in range(big):
        for v in range(u + 1, big):
            if rng.random() < p:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
                sampled_edges += 1
    alive = (1 << big) - 1

    def remove(v: int) -> None:
        nonlocal alive
        alive &= ~(1 << v)
        for w in bits(adj[v]):
            adj[w] &= ~(1 << v)
        adj[v] = 0

    removed_cycles = 0
    while True:
        cyc = _short_cycle(adj, alive, params.girth_threshold)
        if cyc is None:
            break
        remove(min(cyc))
        removed_cycles += 1
    removed_degree = 0
    while True:
        heavy = [v for v in bits(alive) if adj[v].bit_count() > params.degree_bound]
        if not heavy:
            break
        remove(heavy[0])
        removed_degree += 1
    if alive.bit_count() < n:
        raise GenerationError(
            f"pruning left {alive.bit_count()} < {n} vertices; retry with another seed"
        )
    removed_extra = 0
    while alive.bit_count() > n:
        remove((alive & -alive).bit_length() - 1)
        removed_extra += 1
    old = list(bits(alive))
    new_of = {v: i for i, v in enumerate(old)}
    hadj = [0] * n
    for v in old:
        for w in bits(adj[v]):
            hadj[new_of[v]] |= 1 << new_of[w]
    connecting = 0
    full = (1 << n) - 1
    while True:
        comps = []
        seen = 0
        for v in range(n):
            if not seen >> v & 1:
                c = reach_mask(hadj, full, v)
                comps.append(c)
                seen |= c
        if len(comps) == 1:
            break
        u = min(bits(comps[0]), key=lambda x: (hadj[x].bit_count(), x))
        w = min(bits(comps[1]), key=lambda x: (hadj[x].bit_count(), x))
        hadj[u] |= 1 << w
        hadj[w] |= 1 << u
        connecting += 1
    edges = [(u, w) for u in range(n) for w in bits(hadj[u]) if u < w]
    H = WeightedGraph(n, edges, [1] * n, [f"h:{i}" for i in range(n)])
    G = WeightedGraph(
        2 * n,
        edges + [(i, n + i) for i in range(n)],
        [1] * n + [0] * n,
        [f"h:{i}" for i in range(n)] + [f"leaf:{i}" for i in range(n)],
    )
    report = ExpanderReport(
        sampled_vertices=big,
        sampled_edges=sampled_edges,
        removed_for_cycles=removed_cycles,
        removed_for_degree=removed_degree,
        removed_extra=removed_extra,
        connecting_edges=connecting,
        girth=girth(H),
        girth_threshold=params.girth_threshold,
        max_degree=max(H.degree(v) for v in range(n)),
        degree_bound=params.degree_bound,
        connected=connected_mask(H.adj_mask, H.full_mask),
        biclique_eps=complement_biclique_exists(H, params.threshold, budget=biclique_budget, seed=params.seed),
        biclique_two=complement_biclique_exists(H, 2, budget=biclique_budget, seed=params.seed),
    )
    return H, G, report


def _short_cycle(adj: list[int], alive: int, limit: float) -> Optional[list[int]]:
    """Some cycle of length < limit in the live graph, shortest first; None if none."""
    if limit <= 3:
        return None
    n = len(adj)
    G = WeightedGraph(n, [(u, w) for u in bits(alive) for w in bits(adj[u]) if u < w])
    cyc = shortest_cycle(G, [v for v in bits(alive)])
    if cyc is not None and len(cyc) < limit:
        return cyc
    return None


# ---------------------------------------------------------------------------
# extremal search

@dataclass
class ExtremalResult:
    graph: Optional[WeightedGraph]
    alice_value: Fraction
    total: Fraction
    fraction: Fraction
    examined: int
    per_n: dict = field(default_factory=dict)


SEARCH_LIMITS = {"cycles": 15, "trees": 11}


def bracelets(n: int, alphabet: Sequence[Weight]) -> list[tuple]:
    """Weight vectors of length n up to rotation and reflection (lexicographically least representatives)."""
    out = []
    for w in itertools.product(alphabet, repeat=n):
        rev = w[::-1]
        if all(w <= w[i:] + w[:i] and w <= rev[i:] + rev[:i] for i in range(n)):
            out.append(w)
    return out


def _tree_code(adj: list[list[int]], weights: Sequence, root: int, parent: int = -1) -> str:
    kids = sorted(_tree_code(adj, weights, c, root) for c in adj[root] if c != parent)
    return f"({weights[root]}{''.join(kids)})"


def _tree_centers(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    degree = [len(a) for a in adj]
    layer = [v for v in range(n) if degree[v] <= 1]
    left = n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                degree[w] -= 1
                if degree[w] == 1:
                    nxt.append(w)
        layer = nxt
    return layer


def weighted_tree_key(adj: list[list[int]], weights: Sequence) -> str:
    """Canonical form of a vertex-weighted tree (rooted at its centre)."""
    return min(_tree_code(adj, weights, c) for c in _tree_centers(adj))


def search_extremal(
    family: str,
    max_n: int,
    weightset: Sequence[Weight] = (0, 1),
    ruleset: Ruleset = T,
    min_n: int = 3,
    samples: Optional[int] = None,
    seed: int = 0,
) -> ExtremalResult:
    """Find the instance of the family minimizing Alice's share of the weight.

    Cycles are enumerated up to rotation and reflection, weighted trees up to
    isomorphism.  Ties keep the first instance found (smaller n first).  With
    ``samples`` set, each size is sampled instead of enumerated.
    """
    from .solver import Solver

    if family not in SEARCH_LIMITS:
        raise ValueError(f"unknown family {family!r}; expected cycles or trees")
    if max_n > SEARCH_LIMITS[family]:
        raise ValueError(f"{family} search limited to n <= {SEARCH_LIMITS[family]}")
    weightset = [Fraction(w) for w in weightset]
    rng = random.Random(seed)
    best: Optional[tuple] = None
    examined = 0
    per_n = {}
    for n in range(min_n, max_n + 1):
        local = None
        for G in _instances(family, n, weightset, samples, rng):
            if G.total_weight == 0:
                continue
            examined += 1
            res = Solver(G, ruleset).solve()
            frac = res.alice_value / G.total_weight
            if local is None or frac < local:
                local = frac
            if best is None or frac < best[0]:
                best = (frac, G, res.alice_value)
        per_n[n] = local
    if best is None:
        return ExtremalResult(None, Fraction(0), Fraction(0), Fraction(1), examined, per_n)
    frac, G, value = best
    return ExtremalResult(G, value, G.total_weight, frac, examined, per_n)


def _instances(family, n, weightset, samples, rng):
    if family == "cycles":
        if samples is None:
            for w in bracelets(n, weightset):
                yield cycle_graph(w)
        else:
            for _ in range(samples):
                yield cycle_graph([rng.choice(weightset) for _ in range(n)])
        return
    import networkx as nx

    seen = set()
    for T_ in nx.nonisomorphic_trees(n):
        adj = [sorted(T_[v]) for v in range(n)]
        edges = list(T_.edges())
        if samples is None:
            vectors = itertools.product(weightset, repeat=n)
        else:
            vectors = (tuple(rng.choice(weightset) for _ in range(n)) for _ in range(samples))
        for w in vectors:
            key = weighted_tree_key(adj, w)
            if key in seen:
                continue
            seen.add(key)
            yield WeightedGraph(n, edges, list(w))
