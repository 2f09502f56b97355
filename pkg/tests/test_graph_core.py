import itertools
import math
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import graphs
from graphshare.graph_core import (
    GraphError,
    VertexSet,
    WeightedGraph,
    articulation_vertices,
    bits,
    block_cut_tree,
    complement_biclique_exists,
    complete_graph,
    cycle_graph,
    format_graph,
    girth,
    induced_subgraph,
    is_connected,
    is_k_connected,
    parse_graph,
    path_graph,
    star_graph,
    twin_classes,
)


def _bfs_connected(G, S):
    S = set(S)
    if not S:
        return True
    start = min(S)
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for w in G.adj[u]:
            if w in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == S


def test_vertex_set_basics():
    S = VertexSet([3, 1, 3])
    assert list(S) == [1, 3]
    assert len(S) == 2 and 3 in S and 2 not in S
    assert VertexSet.from_mask(S.mask) == S
    with pytest.raises(GraphError):
        VertexSet([-1])


def test_graph_validation():
    with pytest.raises(GraphError):
        WeightedGraph(2, [(0, 2)])
    with pytest.raises(GraphError):
        WeightedGraph(2, [(1, 1)])
    with pytest.raises(GraphError):
        WeightedGraph(2, [], [1])
    with pytest.raises(GraphError):
        WeightedGraph(2, [], [1, -1])


def test_connectivity_examples():
    tri = complete_graph(3)
    assert is_connected(tri, [0, 1, 2])
    p = path_graph([0, 0, 0])
    assert not is_connected(p, [0, 2])
    assert is_connected(p, [])


@given(graphs(max_n=10, connected=False), st.data())
def test_is_connected_matches_bfs(G, data):
    S = data.draw(st.sets(st.integers(0, G.n - 1)))
    assert is_connected(G, S) == _bfs_connected(G, S)


def test_articulation_examples():
    assert list(articulation_vertices(path_graph([0, 0, 0]))) == [1]
    assert list(articulation_vertices(cycle_graph([0] * 5))) == []
    assert list(articulation_vertices(star_graph(3))) == [0]


@given(graphs(min_n=2, max_n=8, connected=False), st.data())
def test_non_articulation_removal_keeps_connected(G, data):
    S = data.draw(st.sets(st.integers(0, G.n - 1), min_size=2))
    if not is_connected(G, S):
        return
    arts = articulation_vertices(G, S)
    for v in S:
        assert (v in arts) == (not is_connected(G, S - {v}))


def test_block_cut_tree_examples():
    p4 = block_cut_tree(path_graph([0] * 4))
    assert len(p4.blocks) == 3 and list(p4.cut_vertices) == [1, 2]
    c5 = block_cut_tree(cycle_graph([0] * 5))
    assert len(c5.blocks) == 1 and not c5.cut_vertices
    # triangle 0-1-2 with pendant edges 0-3 and 1-4
    G = WeightedGraph(5, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)])
    bct = block_cut_tree(G)
    assert sorted(sorted(b) for b in bct.blocks) == [[0, 1, 2], [0, 3], [1, 4]]
    assert list(bct.cut_vertices) == [0, 1]


@given(graphs(max_n=8))
def test_block_cut_tree_properties(G):
    bct = block_cut_tree(G)
    for u, v in G.edges:
        assert sum(1 for b in bct.blocks if u in b and v in b) == 1
    by_deletion = {v for v in range(G.n) if G.n > 1 and not is_connected(G, set(range(G.n)) - {v})}
    assert set(bct.cut_vertices) == by_deletion


def test_girth_examples():
    assert girth(cycle_graph([0] * 7)) == 7
    assert girth(path_graph([0] * 5)) == math.inf
    pet = nx.petersen_graph()
    assert girth(WeightedGraph(10, list(pet.edges()))) == 5


@given(graphs(max_n=9))
def test_girth_matches_networkx(G):
    g = nx.Graph(list(G.edges))
    g.add_nodes_from(range(G.n))
    assert girth(G) == nx.girth(g)


def test_k_connected_examples():
    assert is_k_connected(complete_graph(4), 3)
    c6 = cycle_graph([0] * 6)
    assert is_k_connected(c6, 2) and not is_k_connected(c6, 3)


@settings(max_examples=150)
@given(graphs(min_n=5, max_n=8, connected=False), st.integers(1, 3))
def test_k_connected_matches_cut_enumeration(G, k):
    expected = all(
        is_connected(G, set(range(G.n)) - set(cut))
        for size in range(k)
        for cut in itertools.combinations(range(G.n), size)
    )
    assert is_k_connected(G, k) == expected


def test_twin_examples():
    assert [sorted(c) for c in twin_classes(path_graph([0, 0, 0]))] == [[0, 2], [1]]
    assert len(twin_classes(cycle_graph([1] * 5))) == 5


@given(graphs(max_n=8))
def test_twin_swap_is_automorphism(G):
    edges = {frozenset(e) for e in G.edges}
    for cls in twin_classes(G):
        members = list(cls)
        for u, v in itertools.combinations(members, 2):
            perm = list(range(G.n))
            perm[u], perm[v] = v, u
            assert {frozenset((perm[a], perm[b])) for a, b in G.edges} == edges
            assert G.weights[u] == G.weights[v]


def test_biclique_examples():
    assert complement_biclique_exists(complete_graph(6), 1).found is False
    res = complement_biclique_exists(WeightedGraph(4, []), 2)
    assert res.found and res.exhaustive


@given(graphs(min_n=4, max_n=8, connected=False))
def test_biclique_witness_valid(G):
    res = complement_biclique_exists(G, 2)
    assert res.exhaustive
    if res.found:
        A, B = res.witness
        assert not set(A) & set(B)
        assert not any(G.has_edge(a, b) for a in A for b in B)
    else:
        for A in itertools.combinations(range(G.n), 2):
            for B in itertools.combinations(sorted(set(range(G.n)) - set(A)), 2):
                assert any(G.has_edge(a, b) for a in A for b in B)


@given(graphs(max_n=9))
def test_format_round_trip(G):
    assert parse_graph(format_graph(G)) == G


def test_parse_errors_name_line():
    with pytest.raises(GraphError, match="line 2"):
        parse_graph("p graph 2\ne 0 x\n")
    with pytest.raises(GraphError, match="header"):
        parse_graph("e 0 1\n")
    with pytest.raises(GraphError, match="parallel"):
        parse_graph("p graph 2\ne 0 1\ne 1 0\n")


def test_induced_subgraph_maps_vertices():
    G = path_graph([Fraction(1), Fraction(2), Fraction(3), Fraction(4)])
    H, old = induced_subgraph(G, [1, 3, 2])
    assert old == [1, 2, 3]
    assert list(H.weights) == [2, 3, 4]
    assert sorted(H.edges) == [(0, 1), (1, 2)]


def test_bits_order():
    assert list(bits(0b101001)) == [0, 3, 5]
    rng = random.Random(0)
    for _ in range(50):
        m = rng.getrandbits(40)
        assert sum(1 << b for b in bits(m)) == m
