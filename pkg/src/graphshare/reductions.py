"""Compile quantified formulas into game graphs and check the compilations.

Three compilers are provided:

* ``compile_canonical``: 3-SAT matrix, even number of variables; Alice wins
  canonical TR on the graph iff the formula is true.
* ``compile_misere``: same skeleton for misere TR with an odd number of
  variables, short V-gadgets and doubled order enforcers.
* ``compile_weighted``: not-all-equal matrix; Alice gets more than half of
  the weight in games R and TR iff the formula is true.

Every vertex carries a role label (also stored as the graph label).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .game import R, TR, TR_CANONICAL, TR_MISERE, Player
from .graph_core import WeightedGraph, bits, connected_mask
from .qbf import QbfError, QbfFormula, Semantics, clause_true, evaluate, validate_shape
from .solver import DEFAULT_MEMO_CAP, SolveResult, Solver


@dataclass
class GadgetMap:
    """Role of every vertex, plus the weight groups of the weighted reduction."""

    roles: list[str]
    groups: list[list[int]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.index = {}
        for v, role in enumerate(self.roles):
            if role in self.index:
                raise ValueError(f"role {role} assigned twice")
            self.index[role] = v

    def __getitem__(self, role: str) -> int:
        return self.index[role]

    def __contains__(self, role: str) -> bool:
        return role in self.index

    def with_prefix(self, prefix: str) -> list[int]:
        return [v for v, r in enumerate(self.roles) if r.startswith(prefix)]

    def to_text(self) -> str:
        return "".join(f"{v} {role}\n" for v, role in enumerate(self.roles))


class _Builder:
    def __init__(self):
        self.labels: list[str] = []
        self.weights: list[int] = []
        self.edges: list[tuple[int, int]] = []
        self.adj: list[set[int]] = []

    def add(self, label: str, weight: int = 0) -> int:
        self.labels.append(label)
        self.weights.append(weight)
        self.adj.append(set())
        return len(self.labels) - 1

    def edge(self, u: int, v: int) -> None:
        if u != v and v not in self.adj[u]:
            self.adj[u].add(v)
            self.adj[v].add(u)
            self.edges.append((u, v))

    def graph(self) -> WeightedGraph:
        return WeightedGraph(len(self.labels), self.edges, self.weights, self.labels)


# ---------------------------------------------------------------------------
# canonical and misere TR

def _v_gadget(B: _Builder, host: int, misere: bool) -> None:
    """Canonical: a 5-vertex path centred on the host.  Misere: two leaves on the host."""
    name = B.labels[host]
    if misere:
        for k in (1, 2):
            B.edge(host, B.add(f"V:{name}:a{k}"))
        return
    for k in (1, 2):
        b = B.add(f"V:{name}:b{k}")
        a = B.add(f"V:{name}:a{k}")
        B.edge(host, b)
        B.edge(b, a)


def _compile_tr(f: QbfFormula, misere: bool) -> tuple[WeightedGraph, GadgetMap]:
    validate_shape(f, "misere" if misere else "canonical")
    f = f.normalized()
    n = f.n
    B = _Builder()
    T, F = {}, {}
    for i in range(1, n + 1):
        T[i] = B.add(f"T{i}")
        mid = B.add(f"M{i}")
        F[i] = B.add(f"F{i}")
        B.edge(T[i], mid)
        B.edge(mid, F[i])
        _v_gadget(B, mid, misere)
    for i in range(1, n):
        for u in (T[i], F[i]):
            for v in (T[i + 1], F[i + 1]):
                B.edge(u, v)
    clause_vertices = []
    for l, clause in enumerate(f.clauses, 1):
        c = B.add(f"C{l}")
        clause_vertices.append(c)
        for lit in clause:
            # a negated literal points at T_i, a positive one at F_i
            B.edge(c, T[abs(lit)] if lit < 0 else F[abs(lit)])
    L = B.add("L")
    B.edge(T[n], L)
    B.edge(F[n], L)
    for c in clause_vertices:
        B.edge(c, L)
    for c in clause_vertices:
        _v_gadget(B, c, misere)
    backbone = set(T.values()) | set(F.values()) | {L}
    special = {u: sorted(B.adj[u] & backbone) for u in backbone}
    targets = [v for i in range(2, n + 1) for v in (T[i], F[i])] + [L]
    hubs = ("E", "E'") if misere else ("E",)
    for u in targets:
        uname = B.labels[u]
        made = []
        for hub in hubs:
            e = B.add(f"{hub}:{uname}")
            made.append(e)
            B.edge(e, u)
            for s in special[u]:
                mid = B.add(f"S:{hub}:{uname}:{B.labels[s]}")
                B.edge(e, mid)
                B.edge(mid, s)
                _v_gadget(B, mid, misere)
        if misere:
            B.edge(made[0], made[1])
    G = B.graph()
    notes = ["misere order enforcer: two hubs joined by an edge, each wired like the canonical hub"] if misere else []
    assert connected_mask(G.adj_mask, G.full_mask)
    return G, GadgetMap(list(B.labels), notes=notes)


def compile_canonical(f: QbfFormula) -> tuple[WeightedGraph, GadgetMap]:
    return _compile_tr(f, misere=False)


def compile_misere(f: QbfFormula) -> tuple[WeightedGraph, GadgetMap]:
    return _compile_tr(f, misere=True)


def canonical_vertex_count(n: int, clauses: list[tuple[int, int, int]], misere: bool = False) -> int:
    """Vertex count of the TR compilation from the construction rules alone."""
    v = 2 if misere else 4
    hub_count = 2 if misere else 1
    total = n * (3 + v) + len(clauses) * (1 + v) + 1
    for i in range(2, n + 1):
        specials = 2 + (2 if i < n else 1)  # both vertices of level i-1, then level i+1 or L
        total += 2 * hub_count * (1 + specials * (1 + v))
    total += hub_count * (1 + 2 * (1 + v))  # L's special neighbours are T_n and F_n
    return total


# ---------------------------------------------------------------------------
# weighted reduction (games R and TR)

def weighted_scale(m: int) -> int:
    return 999 ** (m + 1)


def compile_weighted(
    f: QbfFormula,
    z_size: Optional[int] = None,
    allow_repeated: bool = False,
) -> tuple[WeightedGraph, GadgetMap, int]:
    """Weighted graph for a not-all-equal formula, weights multiplied by ``999**(m+1)``.

    Vertex order: a, b, then for each variable x_i, its two path interiors and
    not-x_i, then for each clause its six occurrence vertices and the two
    heavy vertices, then Z.  An occurrence vertex is created per literal
    position, so a clause may repeat a variable when ``allow_repeated`` is set.
    Clause gadget: the occurrences of the literals as written form one
    triangle, their partners another, and both heavy vertices see all six and
    each other.
    """
    validate_shape(f, "weighted")
    f = f.normalized()
    n, m = f.n, f.m
    for j, clause in enumerate(f.clauses, 1):
        if len({abs(l) for l in clause}) < 3 and not allow_repeated:
            raise QbfError(f"clause {j} repeats a variable")
    if n < 2:
        warnings.warn("the weighted reduction is only argued for at least two variables", stacklevel=2)
    S = weighted_scale(m)
    zs = 10 * (m + n) + 1 if z_size is None else z_size
    if zs < 1:
        raise ValueError("Z needs at least one vertex")
    B = _Builder()
    odd_powers = sum(9**e for e in range(n - 1, 1, -2))
    a = B.add("a", (9 ** (n + 2) + 2 * odd_powers) * S + 1)
    b = B.add("b", 9 ** (n + 2) * S)
    pos, neg = {}, {}
    groups = [[a, b]]
    for i in range(1, n + 1):
        w = 9 ** (n + 1 - i) * S
        pos[i] = B.add(f"x{i}", w)
        y = B.add(f"p{i}:x")
        z = B.add(f"p{i}:~x")
        neg[i] = B.add(f"~x{i}", w)
        B.edge(pos[i], y)
        B.edge(y, z)
        B.edge(z, neg[i])
        groups.append([pos[i], neg[i]])
    for j, clause in enumerate(f.clauses, 1):
        light = 10 * 999 ** (m + 1 - j)
        heavy = 11 * 999 ** (m + 1 - j)
        written, partner = [], []
        for p, lit in enumerate(clause, 1):
            i = abs(lit)
            x = B.add(f"x{i}^{j}.{p}", light)
            nx_ = B.add(f"~x{i}^{j}.{p}", light)
            B.edge(x, pos[i])
            B.edge(nx_, neg[i])
            if lit > 0:
                written.append(x)
                partner.append(nx_)
            else:
                written.append(nx_)
                partner.append(x)
        for tri in (written, partner):
            for u, v in itertools.combinations(tri, 2):
                B.edge(u, v)
        c = B.add(f"c{j}", heavy)
        c2 = B.add(f"c'{j}", heavy)
        B.edge(c, c2)
        for u in written + partner:
            B.edge(c, u)
            B.edge(c2, u)
        groups.append(sorted(written + partner + [c, c2]))
    ends = list(pos.values()) + list(neg.values())
    for k in range(zs):
        z = B.add(f"Z{k}")
        for e in ends:
            B.edge(z, e)
    for v in range(2, len(B.labels)):
        B.edge(a, v)
        B.edge(b, v)
    B.edge(a, b)
    G = B.graph()
    notes = ["clause gadget: written-literal triangle, partner triangle, two heavy vertices joined to all six"]
    if allow_repeated:
        notes.append("occurrence vertices are created per literal position")
    return G, GadgetMap(list(B.labels), groups=groups, notes=notes), S


def group_dominance(G: WeightedGraph, gm: GadgetMap) -> bool:
    """Each vertex of a group outweighs the total of all later groups."""
    for k, group in enumerate(gm.groups):
        rest = sum(G.weights[v] for later in gm.groups[k + 1:] for v in later)
        if any(G.weights[v] <= rest for v in group):
            return False
    return True


def sigma_picks(gm: GadgetMap, sigma: dict[int, bool]) -> list[int]:
    """Vertices taken on the variable levels for assignment ``sigma`` (x_i taken means TRUE)."""
    return [gm[f"x{i}"] if sigma[i] else gm[f"~x{i}"] for i in sorted(sigma)]


# ---------------------------------------------------------------------------
# checkers

@dataclass
class SoundnessReport:
    target: str
    truth: bool
    consistent: bool
    details: dict = field(default_factory=dict)


def soundness_check(
    f: QbfFormula,
    target: str,
    z_size: Optional[int] = None,
    memo_cap: int = DEFAULT_MEMO_CAP,
    allow_repeated: bool = False,
) -> SoundnessReport:
    """Compare the solved game with the truth of the formula.

    For the weighted target both games R and TR are solved on the same graph.
    """
    truth = evaluate(f)
    if target in ("canonical", "misere"):
        G, _ = compile_canonical(f) if target == "canonical" else compile_misere(f)
        ruleset = TR_CANONICAL if target == "canonical" else TR_MISERE
        res = Solver(G, ruleset, memo_cap=memo_cap).solve()
        alice = res.winner is Player.ALICE
        return SoundnessReport(target, truth, alice == truth, {"winner": res.winner, "n": G.n, "result": res})
    if target != "weighted":
        raise ValueError(f"unknown target {target!r}")
    G, gm, scale = compile_weighted(f, z_size=z_size, allow_repeated=allow_repeated)
    details = {"n": G.n, "scale": scale, "total": G.total_weight}
    consistent = True
    for ruleset in (R, TR):
        res = Solver(G, ruleset, memo_cap=memo_cap).solve()
        alice = 2 * res.alice_value > G.total_weight
        details[ruleset.name] = res
        consistent = consistent and alice == truth
    return SoundnessReport(target, truth, consistent, details)


@dataclass
class LemmaReport:
    pv: list[int]
    findings: list[str] = field(default_factory=list)
    sigma: dict[int, bool] = field(default_factory=dict)
    shares: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.findings


def lemma_trace_check(
    f: QbfFormula,
    result: Optional[SolveResult] = None,
    z_size: Optional[int] = None,
    allow_repeated: bool = False,
) -> LemmaReport:
    """Inspect the principal variation of the weighted game.

    Expected: a then b, then one vertex of each variable pair in order, and
    Alice's share of every clause group is 41 or 40 units (of 999^-j) as the
    clause is satisfied or not by the chosen assignment.
    """
    G, gm, scale = compile_weighted(f, z_size=z_size, allow_repeated=allow_repeated)
    nf = f.normalized()
    if result is None:
        result = Solver(G, R).solve()
    pv = result.principal_variation
    report = LemmaReport(pv)
    if pv[:2] != [gm["a"], gm["b"]]:
        report.findings.append(f"first moves {pv[:2]} are not a, b")
    for i in range(1, nf.n + 1):
        k = i + 1
        v = pv[k] if k < len(pv) else None
        if v == gm[f"x{i}"]:
            report.sigma[i] = True
        elif v == gm[f"~x{i}"]:
            report.sigma[i] = False
        else:
            report.findings.append(f"move {k + 1} takes {v}, not a vertex of variable {i}")
    if len(report.sigma) < nf.n:
        return report
    alice_moves = set(pv[0::2])
    for j, clause in enumerate(nf.clauses, 1):
        group = gm.groups[nf.n + j]
        unit = 999 ** (nf.m + 1 - j)
        got = sum(G.weights[v] for v in group if v in alice_moves)
        expected = 41 if clause_true(clause, report.sigma, Semantics.NAE3) else 40
        report.shares[j] = (got // unit if got % unit == 0 else Fraction(got, unit), expected)
        if got != expected * unit:
            report.findings.append(f"clause {j}: Alice share {Fraction(got, unit)} units, expected {expected}")
    return report


@dataclass
class GadgetRow:
    sigma: dict[int, bool]
    satisfied: bool
    alice_units: Fraction
    expected: int

    @property
    def ok(self) -> bool:
        return self.alice_units == self.expected


def clause_gadget_check(f: QbfFormula, j: int = 1, z_size: Optional[int] = None, allow_repeated: bool = False) -> list[GadgetRow]:
    """Solve the clause-gadget subgame for every assignment of the clause's variables.

    Position: a and b taken, one vertex of every variable pair taken per the
    assignment (other variables set FALSE), Bob on turn; moves are
    restricted to the eight vertices of clause j.
    """
    G, gm, scale = compile_weighted(f, z_size=z_size, allow_repeated=allow_repeated)
    nf = f.normalized()
    clause = nf.clauses[j - 1]
    variables = sorted({abs(l) for l in clause})
    group = gm.groups[nf.n + j]
    move_mask = sum(1 << v for v in group)
    unit = 999 ** (nf.m + 1 - j)
    solver = Solver(G, R, move_mask=move_mask)
    rows = []
    for values in itertools.product((True, False), repeat=len(variables)):
        sigma = {i: False for i in range(1, nf.n + 1)}
        sigma.update(dict(zip(variables, values)))
        taken = [gm["a"], gm["b"]] + sigma_picks(gm, sigma)
        if len(taken) % 2 == 0:
            raise ValueError("the subgame needs Bob on turn; use an odd number of variables")
        mask = sum(1 << v for v in taken)
        bob_gain, alice_gain = solver.gains(mask)
        units = Fraction(alice_gain) / unit
        sat = clause_true(clause, sigma, Semantics.NAE3)
        rows.append(GadgetRow(sigma, sat, units, 41 if sat else 40))
    return rows


def canonical_observations(f: QbfFormula) -> list[str]:
    """Check the structural claims about the canonical compilation; returns findings.

    Over every position visited by the win search: a mover entering a
    V-gadget loses within two plies, and no position holds both vertices of
    a variable level.  Separately, an Alice opening on an enforced vertex or
    its hub must lose.
    """
    G, gm = compile_canonical(f)
    solver = Solver(G, TR_CANONICAL)
    solver.solve()
    findings = []
    gadgets: dict[str, int] = {}
    for v, role in enumerate(gm.roles):
        if role.startswith("V:"):
            host = role.rsplit(":", 1)[0]
            gadgets[host] = gadgets.get(host, 0) | 1 << v
    levels = [(gm[f"T{i}"], gm[f"F{i}"]) for i in range(1, f.n + 1)]
    for taken in list(solver._wins):
        for t, fv in levels:
            if taken >> t & 1 and taken >> fv & 1:
                findings.append(f"position {taken:#x} holds both {gm.roles[t]} and {gm.roles[fv]}")
        fresh = sum(g for g in gadgets.values() if not taken & g)
        for v in bits(solver._moves(taken, solver._frontier(taken)) & fresh):
            after = taken | 1 << v
            replies = bits(solver._moves(after, solver._frontier(after)))
            if not any(solver._moves(after | 1 << u, solver._frontier(after | 1 << u)) == 0 for u in replies):
                findings.append(f"entering {gm.roles[v]} from {taken:#x} does not lose within two plies")
    for role in gm.roles:
        if role == "L" or role.startswith("E:") or (role[:1] in "TF" and role[1:].isdigit() and role[1:] != "1"):
            if solver.mover_wins(1 << gm[role]) is not True:
                findings.append(f"opening on {role} does not lose for Alice")
    return findings
