import math
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphshare.constructions import (
    ExpanderParams,
    GenerationError,
    bracelets,
    centered_path,
    clique_cycle,
    gnk_graph,
    hnk_graph,
    leafy_expander,
    pizza_cycle,
    search_extremal,
    weighted_tree_key,
    xyz_graph,
)
from graphshare.game import R, T
from graphshare.graph_core import GraphError, cycle_graph, format_graph, girth, is_k_connected, parse_graph
from graphshare.solver import solve


def _round_trips(G):
    return parse_graph(format_graph(G)) == G


def test_pizza_cycle():
    G = pizza_cycle([1, 2, 3, 4])
    assert girth(G) == 4 and is_k_connected(G, 2) and _round_trips(G)
    with pytest.raises(GraphError):
        pizza_cycle([1, 1])


def test_clique_cycle_counts():
    G = clique_cycle(4, 6)
    assert G.n == 12 and G.total_weight == 3
    assert [v for v in range(G.n) if G.weights[v]] == [0, 4, 8]
    for k in (2, 3, 4):
        assert is_k_connected(G, k)
    assert _round_trips(G)
    with pytest.raises(GraphError):
        clique_cycle(4, 5)


@given(st.integers(2, 12), st.integers(2, 5))
def test_clique_cycle_closed_form(k, half):
    G = clique_cycle(k, 2 * half)
    assert G.n == 2 * half * 2 * math.ceil(k / 4)
    assert G.n % 2 == 0 and G.total_weight == half


def test_xyz_counts():
    G = xyz_graph(2, 4)
    labels = [lab.split(":")[0] for lab in G.labels]
    assert (labels.count("X"), labels.count("Y"), labels.count("Z")) == (13, 4, 6)
    assert G.n == 23 and G.total_weight == 4
    assert is_k_connected(xyz_graph(3, 5), 3)
    with pytest.raises(GraphError):
        xyz_graph(2, 3)


@given(st.integers(1, 3), st.integers(0, 3))
def test_xyz_closed_form(k, extra):
    m = k + 2 + extra
    G = xyz_graph(k, m)
    nx_ = G.n - m - comb(m, k)
    assert nx_ - m - comb(m, k) in (2, 3)
    assert G.n % 2 == 1 and G.total_weight == m
    assert _round_trips(G)


def test_hnk_counts():
    G = hnk_graph(2, 1)
    assert G.n == 17 and G.total_weight == 2
    assert solve(G, T).alice_value <= 1
    with pytest.raises(GraphError):
        hnk_graph(13, 0)


@given(st.integers(1, 5), st.integers(0, 2))
def test_hnk_closed_form(n, k):
    G = hnk_graph(n, k)
    assert G.n == n + (2 * k + 1) * (n + 2**n - 1)
    assert G.n % 2 == 1 and G.total_weight == n


def test_gnk_counts():
    assert gnk_graph(4, 2).n == 10
    assert gnk_graph(3, 2).n == 6
    G = gnk_graph(4, 1)
    assert G.n == 8 and all(G.degree(v) == 1 for v in range(4, 8))
    with pytest.raises(GraphError):
        gnk_graph(5, 2)
    with pytest.raises(GraphError):
        gnk_graph(2, 2)


def test_centered_path():
    for t in (1, 2, 3):
        G = centered_path(t)
        assert G.n == 2 * t + 1 and G.total_weight == 1 and G.weights[t] == 1
        assert solve(G, R).alice_value == 0
    assert list(centered_path(1).weights) == [0, 1, 0]


def test_expander_report_and_shape():
    params = ExpanderParams(0.5, 40, seed=1)
    H, G, rep = leafy_expander(params)
    assert H.n == 40 and G.n == 80
    assert G.total_weight == 40 and all(G.degree(v) == 1 for v in range(40, 80))
    assert rep.connected and rep.degree_ok
    if rep.connecting_edges == 0:
        assert rep.girth_ok
    assert _round_trips(G)


def test_expander_is_deterministic():
    a = leafy_expander(ExpanderParams(0.5, 30, seed=7))
    b = leafy_expander(ExpanderParams(0.5, 30, seed=7))
    assert a[1] == b[1] and a[2] == b[2]


def test_expander_params_validation():
    with pytest.raises(ValueError):
        ExpanderParams(1.5, 40)
    with pytest.raises(ValueError):
        ExpanderParams(0.5, 2)
    assert issubclass(GenerationError, RuntimeError)


def test_bracelets_counts():
    # binary bracelet counts for n = 1..6
    assert [len(bracelets(n, (0, 1))) for n in range(1, 7)] == [2, 3, 4, 6, 8, 13]


@settings(max_examples=60)
@given(st.lists(st.integers(0, 2), min_size=3, max_size=8), st.integers(0, 7), st.booleans())
def test_cycle_values_invariant_under_symmetry(w, shift, flip):
    shift %= len(w)
    v = w[shift:] + w[:shift]
    if flip:
        v = v[::-1]
    for rs in (T, R):
        assert solve(cycle_graph(w), rs).alice_value == solve(cycle_graph(v), rs).alice_value


def test_tree_key_ignores_labelling():
    # path a-b-c with weights (1,0,0) labelled two ways
    assert weighted_tree_key([[1], [0, 2], [1]], (1, 0, 0)) == weighted_tree_key([[1], [2, 0], [1]], (0, 0, 1))
    assert weighted_tree_key([[1], [0, 2], [1]], (1, 0, 0)) != weighted_tree_key([[1], [0, 2], [1]], (0, 1, 0))


def test_search_cycles_small():
    res = search_extremal("cycles", 3, (0, 1), T)
    assert res.fraction >= Fraction(1, 2)
    res = search_extremal("cycles", 10, (0, 1), T)
    assert res.fraction == Fraction(1, 2)
    assert res.alice_value == solve(res.graph, T).alice_value


def test_search_trees_finds_small_share():
    res = search_extremal("trees", 8, (0, 1), T)
    assert res.alice_value <= 1 and res.total >= 3


@pytest.mark.slow
def test_search_trees_to_ten():
    res = search_extremal("trees", 10, (0, 1), T)
    assert res.alice_value <= 1 and res.total >= 3


def test_search_guards():
    with pytest.raises(ValueError):
        search_extremal("cycles", 16)
    with pytest.raises(ValueError):
        search_extremal("paths", 5)


def test_cycle_below_half_with_wider_weights():
    # found by sampling 15-cycles with weights 0..3
    w = [1, 1, 3, 0, 3, 0, 2, 3, 0, 2, 1, 1, 3, 0, 3]
    G = pizza_cycle(w)
    assert solve(G, T).alice_value / G.total_weight == Fraction(11, 23)
