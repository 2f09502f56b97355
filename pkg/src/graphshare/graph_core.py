"""Weighted graphs and the connectivity primitives the games are built on.

Vertex sets are stored as Python integers used as bit vectors; bit ``v`` is
set iff vertex ``v`` is a member.  :class:`VertexSet` is a thin immutable
wrapper for the public API, the hot paths work on the raw masks.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence, Union

MAX_VERTICES = 1024


class GraphError(ValueError):
    """Raised for malformed graphs or violated graph preconditions."""


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class VertexSet:
    """Immutable set of vertex indices backed by a bit vector."""

    __slots__ = ("_mask",)

    def __init__(self, members: Iterable[int] = ()):
        mask = 0
        for v in members:
            if v < 0:
                raise GraphError(f"negative vertex index {v}")
            mask |= 1 << v
        self._mask = mask

    @classmethod
    def from_mask(cls, mask: int) -> "VertexSet":
        vs = cls.__new__(cls)
        vs._mask = mask
        return vs

    @property
    def mask(self) -> int:
        return self._mask

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and v >= 0 and bool(self._mask >> v & 1)

    def __iter__(self) -> Iterator[int]:
        return bits(self._mask)

    def __len__(self) -> int:
        return self._mask.bit_count()

    def __bool__(self) -> bool:
        return self._mask != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, VertexSet):
            return self._mask == other._mask
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._mask)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.from_mask(self._mask | as_mask(other))

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.from_mask(self._mask & as_mask(other))

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.from_mask(self._mask & ~as_mask(other))

    def with_(self, v: int) -> "VertexSet":
        return VertexSet.from_mask(self._mask | 1 << v)

    def without(self, v: int) -> "VertexSet":
        return VertexSet.from_mask(self._mask & ~(1 << v))

    def min(self) -> int:
        if not self._mask:
            raise ValueError("min() of empty VertexSet")
        return (self._mask & -self._mask).bit_length() - 1

    def __repr__(self) -> str:
        return "VertexSet({" + ", ".join(map(str, self)) + "})"


SetLike = Union[VertexSet, Iterable[int]]


def as_mask(S: SetLike) -> int:
    if isinstance(S, VertexSet):
        return S.mask
    mask = 0
    for v in S:
        mask |= 1 << v
    return mask


def _parse_weight(value: Union[int, str, Fraction]) -> Fraction:
    w = Fraction(value)
    if w < 0:
        raise GraphError(f"negative weight {value}")
    return w


class WeightedGraph:
    """Simple undirected graph on vertices ``0..n-1`` with rational weights.

    Instances are immutable; equality compares edges, weights and labels.
    """

    __slots__ = ("n", "adj", "weights", "labels", "adj_mask", "_edges", "total_weight")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        weights: Optional[Sequence[Union[int, str, Fraction]]] = None,
        labels: Optional[Sequence[Optional[str]]] = None,
    ):
        if not 0 <= n <= MAX_VERTICES:
            raise GraphError(f"vertex count {n} outside 0..{MAX_VERTICES}")
        masks = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        if weights is None:
            ws = (Fraction(0),) * n
        else:
            if len(weights) != n:
                raise GraphError(f"{len(weights)} weights for {n} vertices")
            ws = tuple(_parse_weight(w) for w in weights)
        if labels is None:
            ls: tuple[Optional[str], ...] = (None,) * n
        else:
            if len(labels) != n:
                raise GraphError(f"{len(labels)} labels for {n} vertices")
            ls = tuple(labels)
        self.n = n
        self.adj_mask = tuple(masks)
        self.adj = tuple(frozenset(bits(m)) for m in masks)
        self.weights = ws
        self.labels = ls
        self._edges = tuple((u, v) for u in range(n) for v in bits(masks[u] >> (u + 1) << (u + 1)))
        self.total_weight = sum(ws, Fraction(0))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as sorted ``(u, v)`` pairs with ``u < v``."""
        return self._edges

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> VertexSet:
        return VertexSet.from_mask(self.full_mask)

    def degree(self, v: int) -> int:
        return self.adj_mask[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj_mask[u] >> v & 1)

    def weight_of(self, S: SetLike) -> Fraction:
        return sum((self.weights[v] for v in bits(as_mask(S))), Fraction(0))

    def label_index(self) -> dict[str, int]:
        """Map each label to its vertex; labels must be unique."""
        index: dict[str, int] = {}
        for v, lab in enumerate(self.labels):
            if lab is not None:
                if lab in index:
                    raise GraphError(f"duplicate label {lab!r}")
                index[lab] = v
        return index

    def with_weights(self, weights: Sequence[Union[int, Fraction]]) -> "WeightedGraph":
        return WeightedGraph(self.n, self._edges, weights, self.labels)

    def _key(self):
        return (self.n, self._edges, self.weights, self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={len(self._edges)}, W={self.total_weight})"


def induced_subgraph(G: WeightedGraph, S: SetLike) -> tuple[WeightedGraph, list[int]]:
    """Return ``G[S]`` relabelled to ``0..|S|-1`` and the list mapping new to old indices."""
    old = list(bits(as_mask(S)))
    new_of = {v: i for i, v in enumerate(old)}
    edges = [(new_of[u], new_of[v]) for u, v in G.edges if u in new_of and v in new_of]
    return (
        WeightedGraph(len(old), edges, [G.weights[v] for v in old], [G.labels[v] for v in old]),
        old,
    )


# ---------------------------------------------------------------------------
# connectivity on bit masks

def reach_mask(adj: Sequence[int], mask: int, start: int) -> int:
    """Vertices of ``mask`` reachable from vertex ``start`` inside ``G[mask]``."""
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= adj[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & mask & ~seen
        seen |= frontier
    return seen


def connected_mask(adj: Sequence[int], mask: int) -> bool:
    if mask & (mask - 1) == 0:
        return True
    return reach_mask(adj, mask, (mask & -mask).bit_length() - 1) == mask


def cut_mask(adj: Sequence[int], mask: int) -> tuple[int, int]:
    """Articulation vertices of ``G[mask]`` (iterative Hopcroft-Tarjan).

    Returns ``(cuts, reached)`` where ``reached`` is the component of the
    lowest member of ``mask``; callers compare it with ``mask`` to detect a
    disconnected input.
    """
    if not mask:
        return 0, 0
    root = (mask & -mask).bit_length() - 1
    disc = {root: 0}
    low = {root: 0}
    counter = 1
    reached = 1 << root
    cuts = 0
    root_children = 0
    stack = [[root, -1, adj[root] & mask]]
    while stack:
        top = stack[-1]
        pending = top[2]
        if pending:
            b = pending & -pending
            top[2] = pending ^ b
            w = b.bit_length() - 1
            v = top[0]
            dw = disc.get(w)
            if dw is None:
                disc[w] = low[w] = counter
                counter += 1
                reached |= b
                stack.append([w, v, adj[w] & mask])
            elif w != top[1] and dw < low[v]:
                low[v] = dw
        else:
            stack.pop()
            v, parent = top[0], top[1]
            if parent >= 0:
                if low[v] < low[parent]:
                    low[parent] = low[v]
                if parent == root:
                    root_children += 1
                elif low[v] >= disc[parent]:
                    cuts |= 1 << parent
    if root_children > 1:
        cuts |= 1 << root
    return cuts, reached


def is_connected(G: WeightedGraph, S: Optional[SetLike] = None) -> bool:
    """True iff ``G[S]`` is connected; empty sets and singletons count as connected."""
    mask = G.full_mask if S is None else as_mask(S)
    if mask & ~G.full_mask:
        raise GraphError("vertex set is not a subset of the graph")
    return connected_mask(G.adj_mask, mask)


def articulation_vertices(G: WeightedGraph, S: Optional[SetLike] = None) -> VertexSet:
    """Cut vertices of the connected induced subgraph ``G[S]``."""
    mask = G.full_mask if S is None else as_mask(S)
    if not mask:
        raise GraphError("articulation_vertices needs a non-empty vertex set")
    cuts, reached = cut_mask(G.adj_mask, mask)
    if reached != mask:
        raise GraphError("induced subgraph is disconnected")
    return VertexSet.from_mask(cuts)


# ---------------------------------------------------------------------------
# blocks

@dataclass(frozen=True)
class BlockCutTree:
    blocks: tuple[VertexSet, ...]
    cut_vertices: VertexSet
    # block index -> cut vertices it contains
    incidence: tuple[VertexSet, ...]

    def blocks_of(self, v: int) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if v in b]


def block_cut_tree(G: WeightedGraph) -> BlockCutTree:
    """Maximal 2-connected components (bridges included) and the cut vertices.

    Blocks are ordered by their smallest member.
    """
    if G.n == 0 or not is_connected(G):
        raise GraphError("block_cut_tree needs a non-empty connected graph")
    if G.n == 1:
        only = VertexSet([0])
        return BlockCutTree((only,), VertexSet(), (VertexSet(),))
    adj = G.adj_mask
    disc = [-1] * G.n
    low = [0] * G.n
    counter = 0
    blocks: list[int] = []
    edge_stack: list[tuple[int, int]] = []
    disc[0] = low[0] = counter
    counter += 1
    stack = [[0, -1, adj[0]]]
    while stack:
        top = stack[-1]
        v = top[0]
        if top[2]:
            b = top[2] & -top[2]
            top[2] ^= b
            w = b.bit_length() - 1
            if disc[w] < 0:
                disc[w] = low[w] = counter
                counter += 1
                edge_stack.append((v, w))
                stack.append([w, v, adj[w]])
            elif w != top[1] and disc[w] < disc[v]:
                edge_stack.append((v, w))
                low[v] = min(low[v], disc[w])
        else:
            stack.pop()
            parent = top[1]
            if parent >= 0:
                low[parent] = min(low[parent], low[v])
                if low[v] >= disc[parent]:
                    block = 0
                    while True:
                        a, c = edge_stack.pop()
                        block |= 1 << a | 1 << c
                        if (a, c) == (parent, v):
                            break
                    blocks.append(block)
    blocks.sort(key=lambda m: (m & -m).bit_length())
    membership = [0] * G.n
    for m in blocks:
        for v in bits(m):
            membership[v] += 1
    cuts = VertexSet(v for v in range(G.n) if membership[v] >= 2)
    return BlockCutTree(
        tuple(VertexSet.from_mask(m) for m in blocks),
        cuts,
        tuple(VertexSet.from_mask(m & cuts.mask) for m in blocks),
    )


# ---------------------------------------------------------------------------
# cycles and connectivity

def shortest_cycle(G: WeightedGraph, S: Optional[SetLike] = None) -> Optional[list[int]]:
    """A shortest cycle of ``G[S]`` as a vertex list, or None for forests."""
    mask = G.full_mask if S is None else as_mask(S)
    adj = G.adj_mask
    best: Optional[list[int]] = None
    for r in bits(mask):
        dist = {r: 0}
        parent = {r: -1}
        queue = deque([r])
        found = None
        while queue and found is None:
            u = queue.popleft()
            if best is not None and 2 * dist[u] + 1 >= len(best):
                break
            for w in bits(adj[u] & mask):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    found = (u, w)
                    break
        if found is None:
            continue
        u, w = found
        length = dist[u] + dist[w] + 1
        if best is not None and length >= len(best):
            continue
        pu, pw = [u], [w]
        while parent[pu[-1]] != -1:
            pu.append(parent[pu[-1]])
        while parent[pw[-1]] != -1:
            pw.append(parent[pw[-1]])
        # drop the shared tail towards the root
        while len(pu) > 1 and len(pw) > 1 and pu[-2] == pw[-2]:
            pu.pop()
            pw.pop()
        cycle = pu + pw[-2::-1]
        best = cycle
    return best


def girth(G: WeightedGraph) -> Union[int, float]:
    """Length of a shortest cycle; ``math.inf`` for forests."""
    cycle = shortest_cycle(G)
    return math.inf if cycle is None else len(cycle)


def _vertex_disjoint_paths(G: WeightedGraph, s: int, t: int, limit: int) -> int:
    """Number of internally disjoint s-t paths, capped at ``limit`` (unit-capacity max-flow)."""
    n = G.n
    # v_in = v, v_out = v + n; the split edge carries the vertex capacity
    cap: dict[tuple[int, int], int] = {}
    out: list[list[int]] = [[] for _ in range(2 * n)]

    def arc(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            out[a].append(b)
            out[b].append(a)
            cap[(a, b)] = 0
            cap.setdefault((b, a), 0)
        cap[(a, b)] += c

    big = n + 1
    for v in range(n):
        arc(v, v + n, big if v in (s, t) else 1)
    for u, v in G.edges:
        arc(u + n, v, big)
        arc(v + n, u, big)
    source, sink = s + n, t
    flow = 0
    while flow < limit:
        prev = {source: source}
        queue = deque([source])
        while queue and sink not in prev:
            a = queue.popleft()
            for b in out[a]:
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    queue.append(b)
        if sink not in prev:
            break
        b = sink
        while b != source:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    return flow


def is_k_connected(G: WeightedGraph, k: int) -> bool:
    """True iff ``|V| > k`` and no fewer than ``k`` vertices disconnect ``G``."""
    if k < 1:
        raise GraphError("k must be at least 1")
    if G.n <= k or not is_connected(G):
        return False
    if k == 1:
        return True
    if k == 2:
        return cut_mask(G.adj_mask, G.full_mask)[0] == 0
    for u in range(G.n):
        for v in range(u + 1, G.n):
            if not G.has_edge(u, v) and _vertex_disjoint_paths(G, u, v, k) < k:
                return False
    return True


# ---------------------------------------------------------------------------
# twins

def twin_classes(G: WeightedGraph) -> list[VertexSet]:
    """Partition into classes of vertices that may be swapped by a weight-preserving automorphism.

    ``u`` and ``v`` are twins iff ``w(u) == w(v)`` and ``N(u) - {v} == N(v) - {u}``.
    Classes are sorted by smallest member.
    """
    groups: dict[tuple, int] = {}
    for v in range(G.n):
        open_key = ("open", G.weights[v], G.adj_mask[v])
        closed_key = ("closed", G.weights[v], G.adj_mask[v] | 1 << v)
        groups[open_key] = groups.get(open_key, 0) | 1 << v
        groups[closed_key] = groups.get(closed_key, 0) | 1 << v
    owner = list(range(G.n))
    for mask in groups.values():
        if mask & (mask - 1):
            first = (mask & -mask).bit_length() - 1
            for v in bits(mask):
                owner[v] = min(owner[v], first)
    classes: dict[int, int] = {}
    for v in range(G.n):
        classes[owner[v]] = classes.get(owner[v], 0) | 1 << v
    return [VertexSet.from_mask(classes[k]) for k in sorted(classes)]


# ---------------------------------------------------------------------------
# bicliques in the complement

@dataclass(frozen=True)
class BicliqueResult:
    found: bool
    exhaustive: bool
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None


def complement_biclique_exists(
    G: WeightedGraph,
    s: int,
    budget: int = 10**7,
    seed: int = 0,
    restarts: int = 500,
) -> BicliqueResult:
    """Search the complement of ``G`` for ``K_{s,s}``.

    Exhaustive when ``C(n, s)**2 <= budget`` (a negative answer is then a
    proof); otherwise randomized greedy restarts, whose negative answer is
    only evidence.
    """
    if s < 1:
        raise GraphError("s must be positive")
    n = G.n
    full = G.full_mask
    # vertices in the complement-neighbourhood of v: non-neighbours other than v
    co = [full & ~G.adj_mask[v] & ~(1 << v) for v in range(n)]
    if 2 * s > n:
        return BicliqueResult(False, True)

    def witness(side: list[int], common: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(side), tuple(list(bits(common))[:s])

    if math.comb(n, s) ** 2 <= budget:
        # depth-first over s-subsets in lexicographic order; common complement
        # neighbourhoods only shrink, so prune when fewer than s remain
        def extend(side: list[int], start: int, common: int):
            if len(side) == s:
                return witness(side, common) if common.bit_count() >= s else None
            for v in range(start, n - (s - len(side)) + 1):
                nxt = common & co[v]
                if nxt.bit_count() >= s:
                    side.append(v)
                    hit = extend(side, v + 1, nxt)
                    side.pop()
                    if hit:
                        return hit
            return None

        hit = extend([], 0, full)
        return BicliqueResult(hit is not None, True, hit)

    rng = random.Random(seed)
    for _ in range(restarts):
        side = [rng.randrange(n)]
        common = co[side[0]]
        while len(side) < s and common.bit_count() >= s:
            candidates = [v for v in range(n) if v not in side]
            scores = [(common & co[v]).bit_count() for v in candidates]
            top = max(scores)
            v = rng.choice([c for c, sc in zip(candidates, scores) if sc == top])
            side.append(v)
            common &= co[v]
        if len(side) == s and common.bit_count() >= s:
            side.sort()
            return BicliqueResult(True, False, witness(side, common))
    return BicliqueResult(False, False)


# ---------------------------------------------------------------------------
# text format

def _format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_graph(G: WeightedGraph) -> str:
    """Serialize in the line-based ``p graph`` format, canonical order."""
    lines = [f"p graph {G.n}"]
    lines += [f"w {v} {_format_fraction(w)}" for v, w in enumerate(G.weights) if w]
    lines += [f"e {u} {v}" for u, v in G.edges]
    lines += [f"l {v} {lab}" for v, lab in enumerate(G.labels) if lab is not None]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> WeightedGraph:
    n: Optional[int] = None
    weights: dict[int, Fraction] = {}
    labels: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, rest = line.partition(" ")
        try:
            if kind == "p":
                fmt, count = rest.split()
                if fmt != "graph" or n is not None:
                    raise GraphError("bad or repeated header")
                n = int(count)
                continue
            if n is None:
                raise GraphError("missing 'p graph <n>' header")
            if kind == "w":
                v, w = rest.split()
                weights[int(v)] = _parse_weight(w)
            elif kind == "e":
                u, v = map(int, rest.split())
                key = (min(u, v), max(u, v))
                if key in seen_edges:
                    raise GraphError(f"parallel edge {key}")
                seen_edges.add(key)
                edges.append(key)
            elif kind == "l":
                v, tag = rest.split(maxsplit=1)
                labels[int(v)] = tag
            else:
                raise GraphError(f"unknown line type {kind!r}")
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphError("missing 'p graph <n>' header")
    for v in list(weights) + list(labels):
        if not 0 <= v < n:
            raise GraphError(f"vertex {v} out of range for n={n}")
    return WeightedGraph(
        n,
        edges,
        [weights.get(v, Fraction(0)) for v in range(n)],
        [labels.get(v) for v in range(n)],
    )


def read_graph(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(G: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(G))


# small constructors used all over the tests and the CLI

def path_graph(weights: Sequence[Union[int, Fraction]]) -> WeightedGraph:
    n = len(weights)
    return WeightedGraph(n, [(i, i + 1) for i in range(n - 1)], weights)


def cycle_graph(weights: Sequence[Union[int, Fraction]]) -> WeightedGraph:
    n = len(weights)
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return WeightedGraph(n, [(i, (i + 1) % n) for i in range(n)], weights)


def complete_graph(n: int, weights=None) -> WeightedGraph:
    return WeightedGraph(n, combinations(range(n), 2), weights)


def star_graph(leaves: int, weights=None) -> WeightedGraph:
    return WeightedGraph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], weights)
