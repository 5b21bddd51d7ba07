"""Full solving pipeline for min-inequality width systems.

Conjunctive systems are solved component by component: decompose the
dependency graph into SCCs, walk them from the last topological component
backwards, substitute already-solved variables, and dispatch each component
to the matching engine (constant folding for edge-free components, maximum
path weights for difference-only ones, bounded search otherwise).  Systems
with min-alternatives are solved per disjunct and merged by pointwise
minimum, which the min-closed solution set makes exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import bab, maxfw
from .constraints import (Assignment, BoundCheck, ConstraintSystem, MinInequality,
                          pointwise_min)
from .depgraph import (UnsupportedDynamicShift, build_graph, is_expansive,
                       is_trivial, tarjan_scc)

TraceFn = Callable[[str], None]

POSITIVE_CYCLE = "positive-cycle"
BOUND_CONFLICT = "bound-conflict"
SEARCH_EXHAUSTED = "search-exhausted"
ALL_DISJUNCTS_UNSAT = "all-disjuncts-unsat"
CONSTANT_CONFLICT = "constant-conflict"


class InternalInvariantError(Exception):
    """A solver postcondition failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class SolveResult:
    sat: bool
    values: Assignment | None = None
    reason: str | None = None
    component: tuple[int, ...] = ()
    detail: str = ""

    @staticmethod
    def satisfied(values: Sequence[int]) -> "SolveResult":
        return SolveResult(True, tuple(values))

    @staticmethod
    def unsatisfiable(reason: str, component: Iterable[int] = (), detail: str = "") -> "SolveResult":
        return SolveResult(False, None, reason, tuple(component), detail)


def substitute(sys: ConstraintSystem, solved: Mapping[int, int]) -> ConstraintSystem:
    """New system with solved variables folded into constants (``2**y``
    addends over solved ``y`` become plain constants)."""
    out = ConstraintSystem(sys.names)
    out._next_label = sys._next_label
    for ineq in sys.inequalities():
        alts = tuple(alt.substitute(solved) for alt in ineq.alternatives)
        out._install(MinInequality(ineq.lhs, alts, ineq.label))
    return out


def _component_ineqs(sys: ConstraintSystem, component: Sequence[int],
                     solved: Mapping[int, int]) -> list[MinInequality]:
    """The component's inequalities with all solved variables folded away.
    Remaining variables must lie inside the component itself."""
    members = set(component)
    folded = []
    for lhs in sorted(component):
        for ineq in sorted(sys.by_var.get(lhs, []), key=lambda q: q.label):
            (alt,) = ineq.alternatives
            new_alt = alt.substitute(solved)
            for var, _ in new_alt.pow2:
                # Topological order guarantees the exponent is in this very
                # component, i.e. a genuinely cyclic dynamic shift.
                raise UnsupportedDynamicShift(
                    f"width of x{lhs} depends on 2**x{var} inside a dependency cycle")
            stray = new_alt.variables() - members
            if stray:
                raise InternalInvariantError(
                    f"unsolved out-of-component variables {sorted(stray)}")
            folded.append(MinInequality(lhs, (new_alt,), ineq.label))
    return folded


def solve_conjunctive(sys: ConstraintSystem, trace: TraceFn | None = None) -> SolveResult:
    """Least solution of a single-alternative system, or an unsatisfiability
    witness naming the failing component."""
    graph = build_graph(sys)
    sccs = tarjan_scc(graph)
    solved: dict[int, int] = {}

    for comp in reversed(sccs.components):
        ineqs = _component_ineqs(sys, comp, solved)
        if is_trivial(graph, comp):
            (v,) = comp
            consts = [alt.const for q in ineqs for alt in q.alternatives]
            solved[v] = max(0, *consts) if consts else 0
            continue
        if is_expansive(graph, comp):
            lb = bab.lower_bounds(comp, ineqs)
            try:
                ub = bab.upper_bounds(comp, ineqs)
            except bab.UnsatByBound as e:
                return SolveResult.unsatisfiable(BOUND_CONFLICT, comp, str(e))
            if any(a > b for a, b in zip(lb, ub)):
                return SolveResult.unsatisfiable(
                    BOUND_CONFLICT, comp, f"lower bounds {lb} exceed upper bounds {ub}")
            if trace is not None:
                trace(f"component {comp}: search box lb={lb} ub={ub}")
            found = bab.branch_and_bound(comp, ineqs, lb, ub, trace=trace)
            if found is None:
                return SolveResult.unsatisfiable(
                    SEARCH_EXHAUSTED, comp, f"no solution in lb={lb} ub={ub}")
            for v, u in zip(comp, found):
                solved[v] = u
            continue
        graph_c, floors = maxfw.build_weighted(comp, ineqs)
        dist = maxfw.max_floyd_warshall(graph_c)
        if isinstance(dist, maxfw.PositiveCycle):
            return SolveResult.unsatisfiable(
                POSITIVE_CYCLE, comp, f"positive-weight cycle through x{dist.vertex}")
        if trace is not None:
            trace(f"component {comp}: max distances {dist}")
        for v, u in zip(comp, maxfw.least_from_distances(dist, floors)):
            solved[v] = u

    return SolveResult.satisfied([solved[v] for v in range(sys.num_vars)])


def solve(sys: ConstraintSystem, trace: TraceFn | None = None) -> SolveResult:
    """Least solution of an arbitrary system.

    Disjuncts (one alternative committed per min) are enumerated lazily and
    solved independently; the pointwise minimum of their least solutions is
    the least solution of the whole system because the solution set is closed
    under pointwise minimum.  That closure is re-checked at runtime.
    """
    best: Assignment | None = None
    first_unsat: SolveResult | None = None
    count = 0
    for disjunct in sys.disjuncts():
        count += 1
        res = solve_conjunctive(disjunct, trace=trace)
        if res.sat:
            assert res.values is not None
            best = res.values if best is None else pointwise_min(best, res.values)
        elif first_unsat is None:
            first_unsat = res
    if best is not None:
        if not sys.satisfied_by(best):
            raise InternalInvariantError(
                "pointwise minimum of disjunct solutions violates the system")
        return SolveResult.satisfied(best)
    if count == 1 and first_unsat is not None:
        return first_unsat
    return SolveResult.unsatisfiable(ALL_DISJUNCTS_UNSAT)


def failed_checks(checks: Sequence[BoundCheck], values: Sequence[int]) -> list[BoundCheck]:
    """Post-solve validation of fixed-width sinks (warnings by default,
    escalated by strict callers)."""
    return [c for c in checks if not c.holds(values)]
