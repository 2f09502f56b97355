"""When does game TR take every vertex?

Constructive take orders on 2-connected graphs, the block-structure
classification of graphs where a full TR playout exists (or is forced),
and an exhaustive oracle for both questions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from .graph_core import (
    GraphError,
    SetLike,
    VertexSet,
    WeightedGraph,
    as_mask,
    bits,
    block_cut_tree,
    connected_mask,
    induced_subgraph,
    is_k_connected,
)

ORACLE_LIMIT = 12


def _distances(adj, mask: int, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in bits(adj[u] & mask):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def extend_split(G: WeightedGraph, C: Union[SetLike, int], forbidden: int, check: bool = True) -> int:
    """One step of growing a set so that it and its complement stay connected.

    Among the vertices outside ``C`` adjacent to ``C``, a pair farthest apart
    in the remaining graph is chosen (lexicographically first among ties);
    neither endpoint is a cut vertex of the remaining graph, and the lower
    endpoint that is not ``forbidden`` is returned.  With ``C`` empty the
    lowest vertex other than ``forbidden`` is returned.  ``C`` may be a
    vertex collection or a raw bit mask.
    """
    c = C if isinstance(C, int) else as_mask(C)
    adj, full = G.adj_mask, G.full_mask
    rest = full & ~c
    if check:
        if not is_k_connected(G, 2):
            raise GraphError("extend_split needs a 2-connected graph")
        if c >> forbidden & 1:
            raise GraphError(f"forbidden vertex {forbidden} is already in C")
        if c.bit_count() > G.n - 2:
            raise GraphError("C must leave at least two vertices outside")
        if not (connected_mask(adj, c) and connected_mask(adj, rest)):
            raise GraphError("C and its complement must both induce connected graphs")
    if not c:
        return next(v for v in range(G.n) if v != forbidden)
    boundary = 0
    for v in bits(c):
        boundary |= adj[v]
    boundary &= rest
    nbrs = list(bits(boundary))
    best = None
    for i, u in enumerate(nbrs):
        dist = _distances(adj, rest, u)
        for w in nbrs[i + 1:]:
            d = dist[w]
            if best is None or d > best[0]:
                best = (d, u, w)
    if best is None:
        raise GraphError("C has fewer than two neighbours outside; graph is not 2-connected")
    _, u, w = best
    return u if u != forbidden else w


def full_order(G: WeightedGraph, u: int, v: int, check: bool = True) -> list[int]:
    """Order all vertices from ``u`` to ``v`` with every prefix and suffix connected."""
    if u == v:
        raise GraphError("full_order needs two distinct vertices")
    if G.n == 2:
        if not G.has_edge(u, v):
            raise GraphError("full_order needs a connected graph")
        return [u, v]
    if check and not is_k_connected(G, 2):
        raise GraphError("full_order needs a 2-connected graph")
    order = [u]
    c = 1 << u
    while len(order) < G.n - 1:
        x = extend_split(G, c, v, check=False)
        order.append(x)
        c |= 1 << x
    order.append(v)
    return order


@dataclass
class TrVerdict:
    completable: bool
    always_completes: bool
    witness: Optional[list[int]] = None
    obstruction: Optional[str] = None


def _block_order(G: WeightedGraph, block: int, first: int, last: int) -> list[int]:
    H, old = induced_subgraph(G, VertexSet.from_mask(block))
    new_of = {x: i for i, x in enumerate(old)}
    return [old[i] for i in full_order(H, new_of[first], new_of[last], check=False)]


def tr_classify(G: WeightedGraph) -> TrVerdict:
    """Decide from the block structure whether a full TR playout exists and is forced."""
    bct = block_cut_tree(G)
    blocks = [b.mask for b in bct.blocks]
    cuts = bct.cut_vertices
    for v in cuts:
        k = len(bct.blocks_of(v))
        if k > 2:
            return TrVerdict(False, False, obstruction=f"cut vertex {v} separates the graph into {k} components")
    for i, b in enumerate(bct.blocks):
        k = len(bct.incidence[i])
        if k > 2:
            return TrVerdict(
                False, False,
                obstruction=f"block {sorted(b)} contains {k} cut vertices",
            )
    always = True
    obstruction = None
    for i, b in enumerate(bct.blocks):
        if len(b) >= 3 and len(bct.incidence[i]) == 2:
            always = False
            obstruction = f"block {sorted(b)} has {len(b)} vertices and 2 cut vertices"
            break
    return TrVerdict(True, always, _witness(G, blocks, [c.mask for c in bct.incidence]), obstruction)


def _witness(G: WeightedGraph, blocks: list[int], incidence: list[int]) -> list[int]:
    if G.n == 1:
        return [0]
    if len(blocks) == 1:
        return _block_order(G, blocks[0], 0, G.n - 1)
    # the blocks form a path; start from an end block (one cut vertex)
    start = min(i for i, inc in enumerate(incidence) if inc.bit_count() == 1)
    order: list[int] = []
    used = {start}
    current = start
    entry = -1
    while True:
        block, inc = blocks[current], incidence[current]
        exits = [x for x in bits(inc) if x != entry]
        if entry < 0:
            leave = exits[0]
            first = min(bits(block & ~(1 << leave)))
            order.extend(_block_order(G, block, first, leave))
        elif exits:
            leave = exits[0]
            order.extend(_block_order(G, block, entry, leave)[1:])
        else:
            last = max(bits(block & ~(1 << entry)))
            order.extend(_block_order(G, block, entry, last)[1:])
            return order
        nxt = next(i for i, b in enumerate(blocks) if i not in used and b >> leave & 1)
        used.add(nxt)
        current, entry = nxt, leave


def tr_oracle(G: WeightedGraph) -> tuple[bool, bool]:
    """(some TR playout takes everything, every maximal TR playout takes everything)."""
    if G.n > ORACLE_LIMIT:
        raise ValueError(f"tr_oracle limited to {ORACLE_LIMIT} vertices (n={G.n})")
    adj, full = G.adj_mask, G.full_mask
    memo: dict[int, tuple[bool, bool]] = {}

    def rec(taken: int) -> tuple[bool, bool]:
        if taken == full:
            return True, True
        hit = memo.get(taken)
        if hit is not None:
            return hit
        exists, forced, any_move = False, True, False
        for v in bits(full & ~taken):
            after = taken | 1 << v
            if connected_mask(adj, after) and connected_mask(adj, full & ~after):
                any_move = True
                e, f = rec(after)
                exists = exists or e
                forced = forced and f
        out = (exists, forced) if any_move else (False, False)
        memo[taken] = out
        return out

    return rec(0)
