"""Core data model for width constraints.

A constraint system is a conjunction of inequalities ``x >= min(t1, ..., tk)``
over nonnegative integer variables, where each ``ti`` is an affine term with
nonnegative variable coefficients (plus optional ``c * 2**y`` addends coming
from dynamic shifts).  Width expressions with nested min/max/+ are normalized
into that shape by distributing ``+`` over min/max and min over max.

All arithmetic is exact (Python integers); terms and inequalities are
immutable and safe to share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

Assignment = tuple[int, ...]


class ConstraintError(Exception):
    """Base class for constraint-construction errors."""


class MalformedExpr(ConstraintError):
    """A width expression violates structural requirements (e.g. 2**e with a
    compound exponent)."""


# ---------------------------------------------------------------------------
# Affine terms
# ---------------------------------------------------------------------------


def _canon(entries: Iterable[tuple[int, int]] | Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    if isinstance(entries, Mapping):
        entries = entries.items()
    acc: dict[int, int] = {}
    for var, coeff in entries:
        acc[var] = acc.get(var, 0) + coeff
    for var, coeff in acc.items():
        if coeff < 0:
            raise MalformedExpr(f"negative coefficient {coeff} on variable {var}")
    return tuple(sorted((v, c) for v, c in acc.items() if c != 0))


@dataclass(frozen=True)
class AffineTerm:
    """``const + sum(coeff * var) + sum(coeff * 2**var)`` with positive
    integer coefficients; zero coefficients are never stored."""

    const: int = 0
    coeffs: tuple[tuple[int, int], ...] = ()
    pow2: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(const: int = 0,
             coeffs: Iterable[tuple[int, int]] | Mapping[int, int] = (),
             pow2: Iterable[tuple[int, int]] | Mapping[int, int] = ()) -> "AffineTerm":
        return AffineTerm(const, _canon(coeffs), _canon(pow2))

    def __add__(self, other: "AffineTerm") -> "AffineTerm":
        return AffineTerm(self.const + other.const,
                          _canon(self.coeffs + other.coeffs),
                          _canon(self.pow2 + other.pow2))

    def variables(self) -> set[int]:
        return {v for v, _ in self.coeffs} | {v for v, _ in self.pow2}

    def evaluate(self, values: Sequence[int]) -> int:
        total = self.const
        for var, coeff in self.coeffs:
            total += coeff * values[var]
        for var, coeff in self.pow2:
            total += coeff * (1 << values[var])
        return total

    def substitute(self, solved: Mapping[int, int]) -> "AffineTerm":
        """Fold solved variables into the constant; 2**y addends over solved
        variables become plain constants."""
        const = self.const
        coeffs = []
        for var, coeff in self.coeffs:
            if var in solved:
                const += coeff * solved[var]
            else:
                coeffs.append((var, coeff))
        pow2 = []
        for var, coeff in self.pow2:
            if var in solved:
                const += coeff * (1 << solved[var])
            else:
                pow2.append((var, coeff))
        return AffineTerm(const, tuple(coeffs), tuple(pow2))

    def render(self, names: Sequence[str]) -> str:
        parts = []
        for var, coeff in self.coeffs:
            parts.append(names[var] if coeff == 1 else f"{coeff}*{names[var]}")
        for var, coeff in self.pow2:
            base = f"2^{names[var]}"
            parts.append(base if coeff == 1 else f"{coeff}*{base}")
        if self.const or not parts:
            parts.append(str(self.const))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


# ---------------------------------------------------------------------------
# Width expressions (pre-normalization trees)
# ---------------------------------------------------------------------------


class WidthExpr:
    """Base of the width-expression tree: Var | Const | Add | Min | Max | Exp2."""

    __slots__ = ()

    def __add__(self, other: "WidthExpr | int") -> "WidthExpr":
        if isinstance(other, int):
            other = Const(other)
        return Add(self, other)


@dataclass(frozen=True)
class Var(WidthExpr):
    index: int


@dataclass(frozen=True)
class Const(WidthExpr):
    value: int


@dataclass(frozen=True)
class Add(WidthExpr):
    left: WidthExpr
    right: WidthExpr


@dataclass(frozen=True)
class Min(WidthExpr):
    left: WidthExpr
    right: WidthExpr


@dataclass(frozen=True)
class Max(WidthExpr):
    left: WidthExpr
    right: WidthExpr


@dataclass(frozen=True)
class Exp2(WidthExpr):
    arg: WidthExpr


def eval_expr(expr: WidthExpr, values: Sequence[int]) -> int:
    """Direct evaluation of a width-expression tree (the normalization
    oracle for tests, and the evaluator for post-solve checks)."""
    if isinstance(expr, Var):
        return values[expr.index]
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Add):
        return eval_expr(expr.left, values) + eval_expr(expr.right, values)
    if isinstance(expr, Min):
        return min(eval_expr(expr.left, values), eval_expr(expr.right, values))
    if isinstance(expr, Max):
        return max(eval_expr(expr.left, values), eval_expr(expr.right, values))
    if isinstance(expr, Exp2):
        return 1 << eval_expr(expr.arg, values)
    raise TypeError(f"not a width expression: {expr!r}")


def expr_variables(expr: WidthExpr) -> set[int]:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, (Add, Min, Max)):
        return expr_variables(expr.left) | expr_variables(expr.right)
    if isinstance(expr, Exp2):
        return expr_variables(expr.arg)
    raise TypeError(f"not a width expression: {expr!r}")


def normal_form(expr: WidthExpr) -> list[list[AffineTerm]]:
    """Rewrite a width expression into max-of-min normal form.

    The result is a list of alternatives-lists: the expression equals
    ``max над groups of min over terms``, so ``x >= expr`` holds exactly when
    every group has some term bounded by x.  ``+`` distributes over both min
    and max, and min distributes over max, which the cross products below
    implement; a top-level max simply concatenates groups.
    """
    if isinstance(expr, Var):
        return [[AffineTerm.make(0, {expr.index: 1})]]
    if isinstance(expr, Const):
        return [[AffineTerm.make(expr.value)]]
    if isinstance(expr, Exp2):
        arg = expr.arg
        if isinstance(arg, Const):
            if arg.value < 0:
                raise MalformedExpr(f"2**{arg.value} is not an integer width")
            return [[AffineTerm.make(1 << arg.value)]]
        if isinstance(arg, Var):
            return [[AffineTerm.make(0, {}, {arg.index: 1})]]
        raise MalformedExpr("2**e is only supported for a variable or constant exponent")
    if isinstance(expr, Add):
        left, right = normal_form(expr.left), normal_form(expr.right)
        return [[a + b for a, b in itertools.product(la, lb)]
                for la, lb in itertools.product(left, right)]
    if isinstance(expr, Max):
        return normal_form(expr.left) + normal_form(expr.right)
    if isinstance(expr, Min):
        left, right = normal_form(expr.left), normal_form(expr.right)
        return [la + lb for la, lb in itertools.product(left, right)]
    raise TypeError(f"not a width expression: {expr!r}")


# ---------------------------------------------------------------------------
# Inequalities and systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinInequality:
    """One constraint ``var >= min(alternatives)``.  Labels are unique across
    a system and identify the inequality in dependency edges and diagnostics."""

    lhs: int
    alternatives: tuple[AffineTerm, ...]
    label: int

    def __post_init__(self):
        if not self.alternatives:
            raise ConstraintError("an inequality needs at least one alternative")

    def rhs_value(self, values: Sequence[int]) -> int:
        return min(alt.evaluate(values) for alt in self.alternatives)

    def holds(self, values: Sequence[int]) -> bool:
        return values[self.lhs] >= self.rhs_value(values)

    def render(self, names: Sequence[str]) -> str:
        alts = [alt.render(names) for alt in self.alternatives]
        rhs = alts[0] if len(alts) == 1 else "min(" + ", ".join(alts) + ")"
        return f"{names[self.lhs]} >= {rhs}"


@dataclass(frozen=True)
class BoundCheck:
    """Post-solve validation ``limit >= expr`` for sinks whose width is fixed
    in the source text.  Not part of the solved system; failures are warnings
    unless the caller escalates them."""

    limit: int
    expr: WidthExpr
    note: str = ""

    def holds(self, values: Sequence[int]) -> bool:
        return self.limit >= eval_expr(self.expr, values)


class ConstraintSystem:
    """Variable table plus per-variable inequality lists.

    Built incrementally (``new_var`` / ``add`` / ``add_terms``), then treated
    as immutable by the solving layers.
    """

    def __init__(self, names: Iterable[str] = ()):
        self.names: list[str] = list(names)
        self.by_var: dict[int, list[MinInequality]] = {}
        self._next_label = 0

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def new_var(self, name: str) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def _install(self, ineq: MinInequality) -> MinInequality:
        for v in (ineq.lhs, *(v for alt in ineq.alternatives for v in alt.variables())):
            if not 0 <= v < len(self.names):
                raise ConstraintError(f"variable index {v} out of range")
        self.by_var.setdefault(ineq.lhs, []).append(ineq)
        return ineq

    def add_terms(self, lhs: int, *alternatives: AffineTerm) -> MinInequality:
        ineq = MinInequality(lhs, tuple(alternatives), self._next_label)
        self._next_label += 1
        return self._install(ineq)

    def add(self, lhs: int, rhs: WidthExpr) -> list[MinInequality]:
        """Normalize ``lhs >= rhs`` and install the resulting inequalities."""
        return [self.add_terms(lhs, *alts) for alts in normal_form(rhs)]

    def inequalities(self) -> Iterator[MinInequality]:
        """All inequalities in (lhs, label) order."""
        for lhs in sorted(self.by_var):
            yield from sorted(self.by_var[lhs], key=lambda q: q.label)

    def is_conjunctive(self) -> bool:
        return all(len(q.alternatives) == 1 for q in self.inequalities())

    def first_violation(self, values: Sequence[int]) -> MinInequality | None:
        """None when every inequality holds, else the first violated one in
        (lhs, label) order."""
        if len(values) != len(self.names):
            raise ValueError(f"assignment has {len(values)} entries for {len(self.names)} variables")
        for ineq in self.inequalities():
            if not ineq.holds(values):
                return ineq
        return None

    def satisfied_by(self, values: Sequence[int]) -> bool:
        return self.first_violation(values) is None

    def disjuncts(self) -> Iterator["ConstraintSystem"]:
        """Lazily yield every conjunctive system obtained by committing each
        multi-alternative inequality to one alternative (source order, so the
        enumeration order is deterministic)."""
        ineqs = list(self.inequalities())
        choice_lists = [ineq.alternatives for ineq in ineqs]
        for picks in itertools.product(*choice_lists):
            sub = ConstraintSystem(self.names)
            sub._next_label = self._next_label
            for ineq, alt in zip(ineqs, picks):
                sub._install(MinInequality(ineq.lhs, (alt,), ineq.label))
            yield sub

    def render(self) -> str:
        return "\n".join(q.render(self.names) for q in self.inequalities())


def pointwise_min(a: Sequence[int], b: Sequence[int]) -> Assignment:
    if len(a) != len(b):
        raise ValueError("assignments have different lengths")
    return tuple(min(x, y) for x, y in zip(a, b))


def pointwise_max(a: Sequence[int], b: Sequence[int]) -> Assignment:
    if len(a) != len(b):
        raise ValueError("assignments have different lengths")
    return tuple(max(x, y) for x, y in zip(a, b))
