import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphshare.game import Player
from graphshare.graph_core import connected_mask, format_graph, is_k_connected, twin_classes
from graphshare.qbf import QbfError, QbfFormula, Semantics
from graphshare.reductions import (
    GadgetMap,
    canonical_observations,
    canonical_vertex_count,
    clause_gadget_check,
    compile_canonical,
    compile_misere,
    compile_weighted,
    group_dominance,
    lemma_trace_check,
    soundness_check,
    weighted_scale,
)

NAE = Semantics.NAE3
TRUE_NAE = QbfFormula.build("eae", [(1, 2, 3)], NAE)
FALSE_NAE = QbfFormula.build("eae", [(2, 2, 2)], NAE)


@st.composite
def sat_formulas(draw, n, max_m=2):
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from((v, -v)))
    clauses = draw(st.lists(st.tuples(lit, lit, lit), min_size=1, max_size=max_m))
    return QbfFormula.build("ea" * (n // 2) + "e" * (n % 2), clauses)


def test_gadget_map_roles():
    gm = GadgetMap(["a", "b", "x1"])
    assert gm["x1"] == 2 and "b" in gm and gm.with_prefix("x") == [2]
    assert gm.to_text() == "0 a\n1 b\n2 x1\n"
    with pytest.raises(ValueError):
        GadgetMap(["a", "a"])


@given(st.sampled_from([2, 4]), st.data())
def test_canonical_count_matches_rules(n, data):
    f = data.draw(sat_formulas(n, max_m=3))
    G, gm = compile_canonical(f)
    assert G.n == canonical_vertex_count(n, list(f.clauses))
    assert all(w == 0 for w in G.weights)
    assert connected_mask(G.adj_mask, G.full_mask)
    assert list(G.labels) == gm.roles


@given(st.sampled_from([1, 3]), st.data())
def test_misere_count_matches_rules(n, data):
    f = data.draw(sat_formulas(n, max_m=3))
    G, _ = compile_misere(f)
    assert G.n == canonical_vertex_count(n, list(f.clauses), misere=True)
    assert connected_mask(G.adj_mask, G.full_mask)


def test_known_counts():
    assert canonical_vertex_count(2, [(1, 2, -2)]) == 63
    assert canonical_vertex_count(3, [(1, 2, 3)], misere=True) == 125


def test_canonical_structure():
    f = QbfFormula.build("ea", [(1, -2, 2)])
    G, gm = compile_canonical(f)
    for role in ("T1", "F1", "T2", "F2", "L", "C1", "M1", "M2", "E:T2", "E:F2", "E:L"):
        assert role in gm
    assert "E:T1" not in gm
    # every V-gadget host has its four path companions
    hosts = {}
    for role in gm.roles:
        if role.startswith("V:"):
            host = role[2:].rsplit(":", 1)[0]
            hosts[host] = hosts.get(host, 0) + 1
    assert hosts and all(k == 4 for k in hosts.values())
    c = gm["C1"]
    # three literal edges (one literal repeats its variable), L and the gadget
    assert G.degree(c) == len({gm["F1"], gm["T2"], gm["F2"]}) + 1 + 2
    assert G.has_edge(c, gm["F1"]) and G.has_edge(c, gm["T2"]) and G.has_edge(c, gm["L"])


def test_misere_structure():
    f = QbfFormula.build("e", [(1, 1, -1)])
    G, gm = compile_misere(f)
    assert connected_mask(G.adj_mask, G.full_mask)
    assert len(gm.with_prefix("V:M1:")) == 2
    assert G.has_edge(gm["E:L"], gm["E':L"])


def test_shape_errors():
    with pytest.raises(QbfError):
        compile_canonical(QbfFormula.build("e", [(1, 1, 1)]))
    with pytest.raises(QbfError):
        compile_misere(QbfFormula.build("ea", [(1, 1, 1)]))
    with pytest.raises(QbfError):
        compile_weighted(QbfFormula.build("eae", [(1, 2, 3)]))


def test_determinism():
    f = QbfFormula.build("eaea", [(1, -2, 3), (-4, 2, 1)])
    assert format_graph(compile_canonical(f)[0]) == format_graph(compile_canonical(f)[0])
    g = QbfFormula.build("eae", [(1, -2, 3)], NAE)
    a, b = compile_weighted(g), compile_weighted(g)
    assert format_graph(a[0]) == format_graph(b[0]) and a[1].roles == b[1].roles


def test_weighted_weights():
    G, gm, S = compile_weighted(TRUE_NAE)
    assert S == weighted_scale(1) == 999**2
    assert G.weights[gm["x1"]] == 9**3 * S
    assert G.weights[gm["~x3"]] == 9 * S
    assert G.weights[gm["c1"]] == G.weights[gm["c'1"]] == 11 * 999
    assert G.weights[gm["x1^1.1"]] == 10 * 999
    assert G.weights[gm["b"]] == 9**5 * S
    assert G.weights[gm["a"]] == (9**5 + 2 * 9**2) * S + 1
    assert len(gm.with_prefix("Z")) == 41
    assert group_dominance(G, gm)


def test_weighted_graph_properties():
    G, gm, _ = compile_weighted(TRUE_NAE)
    assert G.n % 2 == 1
    assert is_k_connected(G, 3)
    zs = {gm[f"Z{k}"] for k in range(41)}
    assert any(set(c) == zs for c in twin_classes(G))


@given(st.data())
@settings(max_examples=30)
def test_weighted_counts_and_dominance(data):
    n = data.draw(st.sampled_from([3, 5]))
    vars_ = list(range(1, n + 1))
    m = data.draw(st.integers(1, 3))
    clauses = []
    for _ in range(m):
        chosen = data.draw(st.permutations(vars_))[:3]
        signs = data.draw(st.lists(st.booleans(), min_size=3, max_size=3))
        clauses.append(tuple(v if s else -v for v, s in zip(chosen, signs)))
    f = QbfFormula.build("ea" * (n // 2) + "e", clauses, NAE)
    G, gm, S = compile_weighted(f)
    assert G.n == 2 + 4 * n + 8 * m + 10 * (m + n) + 1
    assert G.n % 2 == 1
    assert group_dominance(G, gm)
    assert all(w.denominator == 1 for w in G.weights)


def test_repeated_variable_needs_opt_in():
    with pytest.raises(QbfError, match="repeats"):
        compile_weighted(FALSE_NAE)
    G, gm, _ = compile_weighted(FALSE_NAE, allow_repeated=True)
    assert "x2^1.3" in gm and any("per literal position" in note for note in gm.notes)


def test_single_variable_warns():
    with pytest.warns(UserWarning):
        compile_weighted(QbfFormula.build("e", [(1, -1, 1)], NAE), allow_repeated=True)


def test_canonical_soundness_examples():
    t = QbfFormula.build("ea", [(1, 2, -2)])
    f = QbfFormula.build("ea", [(1, 1, 1), (-1, -1, -1)])
    rt, rf = soundness_check(t, "canonical"), soundness_check(f, "canonical")
    assert rt.truth and rt.consistent and rt.details["winner"] is Player.ALICE
    assert not rf.truth and rf.consistent and rf.details["winner"] is Player.BOB


@pytest.mark.parametrize(
    "clauses",
    [[(1, 1, 1)], [(-1, -1, -1)], [(1, 1, -1)]],
)
def test_misere_soundness_examples(clauses):
    rep = soundness_check(QbfFormula.build("e", clauses), "misere")
    assert rep.consistent


@settings(max_examples=15)
@given(sat_formulas(2))
def test_canonical_soundness_random(f):
    assert soundness_check(f, "canonical").consistent


def test_canonical_observations_hold():
    for clauses in ([(1, 2, -2)], [(1, 1, 1), (-1, -1, -1)], [(-1, 2, 2)]):
        assert canonical_observations(QbfFormula.build("ea", clauses)) == []


def test_weighted_soundness_small_z():
    for f, truth in ((TRUE_NAE, True), (FALSE_NAE, False)):
        rep = soundness_check(f, "weighted", z_size=5, allow_repeated=True)
        assert rep.truth is truth and rep.consistent
        for name in ("r", "tr"):
            assert (2 * rep.details[name].alice_value > rep.details["total"]) is truth


def test_lemma_trace_small_z():
    rep = lemma_trace_check(TRUE_NAE, z_size=5)
    assert rep.ok, rep.findings
    assert len(rep.sigma) == 3 and rep.shares[1][0] == rep.shares[1][1] == 41


def test_clause_gadget_dichotomy():
    rows = clause_gadget_check(QbfFormula.build("eae", [(1, -2, 3)], NAE), z_size=5)
    assert len(rows) == 8
    assert all(r.ok for r in rows)
    assert {r.expected for r in rows} == {40, 41}


@pytest.mark.slow
def test_weighted_soundness_full_z():
    for f in (TRUE_NAE, FALSE_NAE):
        assert soundness_check(f, "weighted", allow_repeated=True).consistent
