"""Least solution of an expansive component: finite bounds, then search.

An expansive component has a cycle that amplifies values (an edge of weight
> 1, or one inequality fanning out to two cycle vertices), which forces every
solution under a computable ceiling.  Composing inequalities along a cycle
yields ``x >= a0 + a*x`` with ``a > 1``, hence ``x <= floor(-a0/(a-1))``; a
breadth-first sweep then bounds the remaining variables.  Within [lb, ub] the
least solution is found by a midpoint branch-and-bound.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from .constraints import AffineTerm, MinInequality


class UnsatByBound(Exception):
    """A derived upper bound is negative or falls below the lower bound, so
    the component has no solution."""

    def __init__(self, var: int, message: str):
        super().__init__(message)
        self.var = var


@dataclass(frozen=True)
class PathIneq:
    """Weakened inequality ``src >= const + coeff * dst`` obtained by chaining
    single-variable weakenings along a path; composition multiplies
    coefficients and accumulates constants."""

    src: int
    const: int
    coeff: int
    dst: int

    def extend(self, edge_const: int, edge_coeff: int, new_dst: int) -> "PathIneq":
        return PathIneq(self.src,
                        self.const + self.coeff * edge_const,
                        self.coeff * edge_coeff,
                        new_dst)


def _floor_div(a: int, b: int) -> int:
    # Python's // already floors toward -inf, which is what bound derivation needs.
    return a // b


class _ComponentView:
    """Index-local view of a component's (substituted) inequalities."""

    def __init__(self, component: Sequence[int], ineqs: Sequence[MinInequality]):
        self.component = tuple(component)
        self.local = {v: i for i, v in enumerate(component)}
        self.n = len(component)
        # (lhs, const, ((var, coeff), ...), label) with local indices
        self.rows: list[tuple[int, int, tuple[tuple[int, int], ...], int]] = []
        for ineq in ineqs:
            (alt,) = ineq.alternatives
            if alt.pow2:
                raise ValueError(f"inequality {ineq.label} still contains a 2**x addend")
            coeffs = tuple((self.local[v], c) for v, c in alt.coeffs)
            self.rows.append((self.local[ineq.lhs], alt.const, coeffs, ineq.label))
        self.rows.sort(key=lambda r: (r[0], r[3]))
        # Edges (src, label, coeff, dst, row const) in scan order.
        self.edges = [(lhs, label, c, v, const)
                      for lhs, const, coeffs, label in self.rows
                      for v, c in coeffs]
        self.out: list[list[tuple[int, int, int, int]]] = [[] for _ in range(self.n)]
        for lhs, label, c, v, const in self.edges:
            self.out[lhs].append((v, label, c, const))
        for adj in self.out:
            adj.sort()


def _shortest_path(view: _ComponentView, start: int, goal: int) -> list[tuple[int, int, int, int]]:
    """BFS path from start to goal as a list of (src, const, coeff, dst)
    steps; ties broken by smallest destination index.  The empty path is
    returned when start == goal."""
    if start == goal:
        return []
    prev: dict[int, tuple[int, int, int, int]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        u = queue.popleft()
        for v, _label, coeff, const in view.out[u]:
            if v in seen:
                continue
            seen.add(v)
            prev[v] = (u, const, coeff, v)
            if v == goal:
                queue.clear()
                break
            queue.append(v)
    if goal not in prev:
        raise ValueError("no path inside a strongly connected component")
    steps = []
    node = goal
    while node != start:
        step = prev[node]
        steps.append(step)
        node = step[0]
    steps.reverse()
    return steps


def _compose(start_ineq: PathIneq, steps: Sequence[tuple[int, int, int, int]]) -> PathIneq:
    ineq = start_ineq
    for _src, const, coeff, dst in steps:
        ineq = ineq.extend(const, coeff, dst)
    return ineq


def lower_bounds(component: Sequence[int], ineqs: Sequence[MinInequality]) -> list[int]:
    """Per-variable max of 0 and the constants of its inequalities."""
    view = _ComponentView(component, ineqs)
    lb = [0] * view.n
    for lhs, const, _coeffs, _label in view.rows:
        lb[lhs] = max(lb[lhs], const)
    return lb


def upper_bounds(component: Sequence[int], ineqs: Sequence[MinInequality]) -> list[int]:
    """Finite upper bounds for every variable of an expansive component.

    Seeds one variable with a cycle-derived ceiling, then spreads bounds by
    BFS: knowing ``x <= c`` and ``x >= b0 + a*y + ...`` (other variables
    dropped at their floor 0) gives ``y <= floor((c - b0) / a)``.  Bounds need
    not be tight; any sound ceiling feeds the search.
    """
    view = _ComponentView(component, ineqs)
    seed = _seed_bound(view)
    if seed is None:
        raise ValueError("component is not expansive")
    seed_var, seed_ub = seed
    if seed_ub < 0:
        raise UnsatByBound(view.component[seed_var],
                           f"cycle forces an upper bound of {seed_ub}")

    ub: list[int | None] = [None] * view.n
    ub[seed_var] = seed_ub
    queue = deque([seed_var])
    while queue:
        u = queue.popleft()
        bound_u = ub[u]
        assert bound_u is not None
        for v, _label, coeff, const in view.out[u]:
            if ub[v] is not None:
                continue
            bound_v = _floor_div(bound_u - const, coeff)
            if bound_v < 0:
                raise UnsatByBound(view.component[v],
                                   f"propagated upper bound of {bound_v}")
            ub[v] = bound_v
            queue.append(v)
    if any(b is None for b in ub):
        raise ValueError("BFS failed to reach every vertex of the component")
    return [b for b in ub if b is not None]


def _seed_bound(view: _ComponentView) -> tuple[int, int] | None:
    # Heavy edge first: compose it with a path back to its source.
    for lhs, label, coeff, dst, const in view.edges:
        if coeff > 1:
            start = PathIneq(lhs, const, coeff, dst)
            cycle = _compose(start, _shortest_path(view, dst, lhs))
            assert cycle.dst == lhs and cycle.coeff > 1
            return lhs, _floor_div(-cycle.const, cycle.coeff - 1)
    # Otherwise (all weights 1) find one inequality with two rhs variables:
    # x >= b0 + y1 + y2 + ..., loop both y1 and y2 back to x.
    for lhs, const, coeffs, _label in view.rows:
        if len(coeffs) >= 2:
            (y1, _c1), (y2, _c2) = coeffs[0], coeffs[1]
            back1 = _compose(PathIneq(lhs, 0, 1, y1), _shortest_path(view, y1, lhs))
            back2 = _compose(PathIneq(lhs, 0, 1, y2), _shortest_path(view, y2, lhs))
            # x >= b0 + (back1.const + x) + (back2.const + x)  =>  x <= -(b0 + a1 + a2)
            return lhs, -(const + back1.const + back2.const)
    return None


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------

TraceFn = Callable[[str], None]


def branch_and_bound(component: Sequence[int], ineqs: Sequence[MinInequality],
                     lb: Sequence[int], ub: Sequence[int],
                     trace: TraceFn | None = None,
                     on_call: Callable[[int, int], None] | None = None,
                     ) -> tuple[int, ...] | None:
    """Least solution within [lb, ub], or None when the box is empty.

    Midpoint probing: a satisfying midpoint becomes the new upper bound; a
    violated inequality either caps its smallest shrinkable rhs variable
    (retrying above it if that fails) or raises the lhs floor.  Every step
    halves one coordinate interval, so recursion depth stays logarithmic in
    the box size.  ``on_call(depth, box_size)`` fires at each call entry with
    ``box_size = sum(ub - lb)``, which strictly shrinks down every branch.
    """
    view = _ComponentView(component, ineqs)

    def emit(rule: str, lo: Sequence[int], hi: Sequence[int]) -> None:
        if trace is not None:
            trace(f"bab: {rule} lb={tuple(lo)} ub={tuple(hi)}")

    def violation(values: Sequence[int]) -> tuple[int, tuple[tuple[int, int], ...]] | None:
        for lhs, const, coeffs, _label in view.rows:
            rhs = const + sum(c * values[v] for v, c in coeffs)
            if values[lhs] < rhs:
                return lhs, coeffs
        return None

    def search(lo: list[int], hi: list[int], depth: int) -> tuple[int, ...] | None:
        if on_call is not None:
            on_call(depth, sum(b - a for a, b in zip(lo, hi)))
        if any(a > b for a, b in zip(lo, hi)):
            emit("not lb <= ub", lo, hi)
            return None
        if lo == hi:
            if violation(lo) is None:
                emit("eq-sat", lo, hi)
                return tuple(lo)
            emit("eq-unsat", lo, hi)
            return None
        mid = [(a + b) // 2 for a, b in zip(lo, hi)]
        bad = violation(mid)
        if bad is None:
            emit("neq-true", lo, hi)
            return search(lo, mid, depth + 1)
        lhs, coeffs = bad
        for j, coeff in coeffs:
            if coeff > 0 and lo[j] < mid[j]:
                emit("neq-false-rhs-1", lo, hi)
                capped = hi.copy()
                capped[j] = mid[j] - 1
                found = search(lo, capped, depth + 1)
                if found is not None:
                    return found
                emit("neq-false-rhs-2", lo, hi)
                raised = lo.copy()
                raised[j] = mid[j]
                return search(raised, hi, depth + 1)
        emit("neq-false-lhs", lo, hi)
        raised = lo.copy()
        raised[lhs] = mid[lhs] + 1
        return search(raised, hi, depth + 1)

    return search(list(lb), list(ub), 0)
