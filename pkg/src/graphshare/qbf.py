"""Quantified boolean formulas with 3-literal clauses.

Clauses use DIMACS literals: ``v`` for a variable and ``-v`` for its
negation.  Two clause semantics are supported: ordinary 3-SAT (some literal
true) and not-all-equal (some literal true and some false).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence


class Semantics(enum.Enum):
    SAT3 = "sat3"
    NAE3 = "nae3"


class QbfError(ValueError):
    pass


EXISTS, FORALL = "e", "a"
EVAL_LIMIT = 24


@dataclass(frozen=True)
class QbfFormula:
    prefix: tuple[tuple[str, int], ...]
    clauses: tuple[tuple[int, int, int], ...]
    semantics: Semantics = Semantics.SAT3

    def __post_init__(self):
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise QbfError("a variable is quantified twice")
        for q, v in self.prefix:
            if q not in (EXISTS, FORALL) or v < 1:
                raise QbfError(f"bad quantifier entry {(q, v)!r}")
        known = set(names)
        for clause in self.clauses:
            if len(clause) != 3:
                raise QbfError(f"clause {list(clause)} must have exactly 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) not in known:
                    raise QbfError(f"literal {lit} uses an unquantified variable")

    @classmethod
    def build(cls, quantifiers: str, clauses: Sequence[Sequence[int]], semantics: Semantics = Semantics.SAT3) -> "QbfFormula":
        """``quantifiers`` like ``"eae"``: variable i+1 gets the i-th quantifier."""
        return cls(
            tuple((q, i + 1) for i, q in enumerate(quantifiers)),
            tuple(tuple(c) for c in clauses),
            semantics,
        )

    @property
    def n(self) -> int:
        return len(self.prefix)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def quantifiers(self) -> str:
        return "".join(q for q, _ in self.prefix)

    def is_alternating(self) -> bool:
        qs = self.quantifiers
        return all(qs[i] != qs[i + 1] for i in range(len(qs) - 1))

    def normalized(self) -> "QbfFormula":
        """Same formula with variables renamed to 1..n in prefix order."""
        rename = {v: i + 1 for i, (_, v) in enumerate(self.prefix)}
        return QbfFormula(
            tuple((q, rename[v]) for q, v in self.prefix),
            tuple(tuple(rename[abs(l)] * (1 if l > 0 else -1) for l in c) for c in self.clauses),
            self.semantics,
        )


def clause_true(clause: Sequence[int], assignment: dict[int, bool], semantics: Semantics) -> bool:
    values = [assignment[abs(l)] == (l > 0) for l in clause]
    if semantics is Semantics.SAT3:
        return any(values)
    return any(values) and not all(values)


def matrix_true(f: QbfFormula, assignment: dict[int, bool]) -> bool:
    return all(clause_true(c, assignment, f.semantics) for c in f.clauses)


def evaluate(f: QbfFormula) -> bool:
    """Truth value by recursive expansion of the prefix."""
    if f.n > EVAL_LIMIT:
        raise QbfError(f"evaluate limited to {EVAL_LIMIT} variables (n={f.n})")
    assignment: dict[int, bool] = {}

    def rec(i: int) -> bool:
        if i == f.n:
            return matrix_true(f, assignment)
        q, v = f.prefix[i]
        for value in (False, True):
            assignment[v] = value
            r = rec(i + 1)
            if q == EXISTS and r:
                return True
            if q == FORALL and not r:
                return False
        return q == FORALL

    return rec(0)


def evaluate_truth_table(f: QbfFormula) -> bool:
    """Second evaluator: tabulate the matrix, then fold quantifiers from the innermost."""
    if f.n > EVAL_LIMIT:
        raise QbfError(f"evaluate limited to {EVAL_LIMIT} variables (n={f.n})")
    order = [v for _, v in f.prefix]
    # table[i] is the matrix value when the bits of i (most significant = first variable) are the assignment
    table = []
    for values in itertools.product((False, True), repeat=f.n):
        table.append(matrix_true(f, dict(zip(order, values))))
    for q, _ in reversed(f.prefix):
        pairs = zip(table[0::2], table[1::2])
        table = [a or b for a, b in pairs] if q == EXISTS else [a and b for a, b in pairs]
    return table[0]


# ---------------------------------------------------------------------------
# QDIMACS

def parse_qdimacs(text: str) -> QbfFormula:
    """Parse QDIMACS with singleton quantifier lines; ``c nae`` selects NAE semantics."""
    semantics = Semantics.SAT3
    prefix: list[tuple[str, int]] = []
    clauses: list[tuple[int, ...]] = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            if line.split()[1:2] == ["nae"]:
                semantics = Semantics.NAE3
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise QbfError(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            header = (int(parts[2]), int(parts[3]))
            continue
        try:
            nums = [int(x) for x in (parts[1:] if parts[0] in (EXISTS, FORALL) else parts)]
        except ValueError:
            raise QbfError(f"line {lineno}: expected integers") from None
        if nums[-1:] != [0]:
            raise QbfError(f"line {lineno}: line must end with 0")
        nums = nums[:-1]
        if parts[0] in (EXISTS, FORALL):
            if clauses:
                raise QbfError(f"line {lineno}: quantifier after clauses")
            if len(nums) != 1:
                raise QbfError(f"line {lineno}: quantifier blocks must hold exactly one variable")
            if prefix and prefix[-1][0] == parts[0]:
                raise QbfError(f"line {lineno}: quantifiers must alternate")
            prefix.append((parts[0], nums[0]))
        else:
            if len(nums) != 3:
                raise QbfError(f"line {lineno}: clause has {len(nums)} literals, expected 3")
            clauses.append(tuple(nums))
    if header is not None and header[1] != len(clauses):
        raise QbfError(f"header announces {header[1]} clauses, found {len(clauses)}")
    try:
        return QbfFormula(tuple(prefix), tuple(clauses), semantics)
    except QbfError as e:
        raise QbfError(f"invalid formula: {e}") from None


def to_qdimacs(f: QbfFormula) -> str:
    lines = []
    if f.semantics is Semantics.NAE3:
        lines.append("c nae")
    top = max((v for _, v in f.prefix), default=0)
    lines.append(f"p cnf {top} {f.m}")
    lines += [f"{q} {v} 0" for q, v in f.prefix]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# shapes required by the reductions

TARGETS = ("canonical", "misere", "weighted")


def shape_problem(f: QbfFormula, target: str) -> str:
    """Empty string when ``f`` fits the target reduction, else the violation."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")
    if f.n == 0:
        return "formula has no variables"
    if f.prefix[0][0] != EXISTS:
        return "prefix must start with an existential quantifier"
    if not f.is_alternating():
        return "quantifiers must alternate"
    if target == "canonical":
        if f.semantics is not Semantics.SAT3:
            return "canonical reduction needs 3-SAT clauses"
        if f.n % 2:
            return f"canonical reduction needs an even number of variables (n={f.n})"
    elif target == "misere":
        if f.semantics is not Semantics.SAT3:
            return "misere reduction needs 3-SAT clauses"
        if f.n % 2 == 0:
            return f"misere reduction needs an odd number of variables (n={f.n})"
    else:
        if f.semantics is not Semantics.NAE3:
            return "weighted reduction needs not-all-equal clauses"
        if f.n % 2 == 0:
            return f"weighted reduction needs the prefix to end with an existential quantifier (n={f.n})"
    return ""


def validate_shape(f: QbfFormula, target: str) -> None:
    problem = shape_problem(f, target)
    if problem:
        raise QbfError(f"{target}: {problem}")


def pad_parity(f: QbfFormula, target: str) -> QbfFormula:
    """Append one unused variable if that fixes the parity for ``target``."""
    if not shape_problem(f, target):
        return f
    if not f.prefix or f.prefix[0][0] != EXISTS or not f.is_alternating():
        raise QbfError(f"{target}: cannot pad a formula that does not alternate from an existential")
    last = f.prefix[-1][0]
    fresh = max(v for _, v in f.prefix) + 1
    padded = QbfFormula(f.prefix + ((FORALL if last == EXISTS else EXISTS, fresh),), f.clauses, f.semantics)
    problem = shape_problem(padded, target)
    if problem:
        raise QbfError(f"{target}: padding does not help ({problem})")
    return padded
