"""Independent least-solution oracles used to cross-check the solver.

Both procedures avoid the solver's machinery entirely (no dependency graph,
no path-weight matrices, no bound derivation): one climbs the monotone
consequence operator from zero, the other searches a bounded box directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .constraints import Assignment, ConstraintSystem

SAT = "sat"
DIVERGED = "diverged"
NO_SOLUTION = "no-solution-in-box"

# 2**x beyond this exponent dwarfs any realistic width; treat as divergence.
EXP_ARG_LIMIT = 64


@dataclass(frozen=True)
class OracleResult:
    kind: str
    values: Assignment | None = None
    limit: int = 0

    @property
    def sat(self) -> bool:
        return self.kind == SAT


# (const, ((var, coeff), ...), ((var, coeff), ...)) per alternative,
# grouped per inequality, grouped per constrained variable.
_CompiledVar = list[list[tuple[int, tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]]]


def _compile(sys: ConstraintSystem) -> list[_CompiledVar]:
    per_var: list[_CompiledVar] = [[] for _ in range(sys.num_vars)]
    for ineq in sys.inequalities():
        per_var[ineq.lhs].append(
            [(alt.const, alt.coeffs, alt.pow2) for alt in ineq.alternatives])
    return per_var


def kleene_least(sys: ConstraintSystem, cutoff: int = 10 ** 6,
                 on_step: Callable[[Assignment], None] | None = None) -> OracleResult:
    """Ascending iteration ``a := max(a, F(a))`` from the all-zero point.

    ``F(a)[i]`` is the largest forced floor for variable i: the max over its
    inequalities of the min over alternatives, clamped at 0.  F is monotone
    and every solution is a post-fixpoint, so the iterates never exceed any
    solution; reaching a fixpoint yields the least solution, while exceeding
    the cutoff (or an exponent blowing past 2**64) reports divergence.

    Divergence of a positive-weight difference cycle raises values by a
    constant per sweep, which would take ~cutoff sweeps to detect naively.
    Every so often the loop therefore looks for a self-sustaining growth
    certificate: a set S of recently-grown variables such that each i in S
    has an inequality currently forcing ``a[i] + 1`` whose every alternative
    puts total coefficient >= 1 on S.  Bumping all of S by one then keeps the
    certificate valid (coefficients are nonnegative and ``2**(y+1) >= 2**y + 1``),
    so values on S grow without bound and Diverged is sound for any cutoff.
    """
    compiled = _compile(sys)
    n = sys.num_vars
    a = [0] * n
    sweep = 0
    next_check = 64
    window_base = list(a)

    while True:
        changed = False
        new = list(a)
        for i, groups in enumerate(compiled):
            best = new[i]
            for alts in groups:
                forced = None
                for const, coeffs, pow2 in alts:
                    val = const
                    for v, c in coeffs:
                        val += c * a[v]
                    for v, c in pow2:
                        if a[v] > EXP_ARG_LIMIT:
                            return OracleResult(DIVERGED, None, cutoff)
                        val += c << a[v]
                    if forced is None or val < forced:
                        forced = val
                assert forced is not None
                if forced > best:
                    best = forced
            if best > new[i]:
                new[i] = best
                changed = True
        if not changed:
            return OracleResult(SAT, tuple(a), cutoff)
        a = new
        if on_step is not None:
            on_step(tuple(a))
        if max(a) > cutoff:
            return OracleResult(DIVERGED, None, cutoff)
        sweep += 1
        if sweep >= next_check:
            grown = {i for i in range(n) if a[i] > window_base[i]}
            if grown and _growth_certificate(compiled, a, grown):
                return OracleResult(DIVERGED, None, cutoff)
            window_base = list(a)
            next_check *= 2


def _growth_certificate(compiled: list[_CompiledVar], a: Sequence[int],
                        grown: set[int]) -> bool:
    for i in grown:
        witnessed = False
        for alts in compiled[i]:
            ok = True
            for const, coeffs, pow2 in alts:
                val = const
                weight_on_grown = 0
                for v, c in coeffs:
                    val += c * a[v]
                    if v in grown:
                        weight_on_grown += c
                for v, c in pow2:
                    val += c << a[v]
                    if v in grown:
                        weight_on_grown += c
                if val < a[i] + 1 or weight_on_grown < 1:
                    ok = False
                    break
            if ok:
                witnessed = True
                break
        if not witnessed:
            return False
    return True


def exhaustive_least(sys: ConstraintSystem, bound: int) -> OracleResult:
    """Least solution inside the box [0, bound]^n by systematic search.

    Depth-first over variables, values ascending, pruning a branch as soon
    as some inequality is already hopeless (largest possible lhs below the
    smallest possible rhs, with unassigned variables taken at the optimistic
    end of the box).  The solution set is closed under pointwise minimum, so
    its least element is the lexicographically smallest solution under every
    variable order at once; the first assignment found is therefore the
    pointwise minimum over all satisfying points of the box regardless of the
    order used.  That freedom is spent on a connectivity order (variables
    sharing inequalities sit next to each other) so contradictions surface at
    shallow depths instead of being rediscovered under every prefix.
    """
    n = sys.num_vars
    ineqs = [(q.lhs, [(alt.const, alt.coeffs, alt.pow2) for alt in q.alternatives])
             for q in sys.inequalities()]
    members = [frozenset({lhs} | {v for _c, coeffs, pow2 in alts
                                  for v, _ in (*coeffs, *pow2)})
               for lhs, alts in ineqs]
    order = _connectivity_order(n, members)
    rank = {v: i for i, v in enumerate(order)}

    involve: list[list[int]] = [[] for _ in range(n)]
    for idx, mentioned in enumerate(members):
        # Re-check an inequality whenever one of its variables is assigned.
        for v in mentioned:
            involve[rank[v]].append(idx)

    values = [0] * n          # indexed by original variable id
    assigned = [False] * n

    def feasible(idx: int) -> bool:
        # An alternative can still be met iff the maximum over the remaining
        # box of (lhs - rhs) is nonnegative.  Shared occurrences of the lhs
        # variable are combined first, so self-referential inequalities like
        # x >= x + 8 are refuted without assigning anything.  Once every
        # variable is assigned this is an exact evaluation.
        lhs, alts = ineqs[idx]
        for const, coeffs, pow2 in alts:
            margin = -const
            self_coeff = 1
            for v, c in coeffs:
                if v == lhs:
                    self_coeff -= c
                elif assigned[v]:
                    margin -= c * values[v]
            for v, c in pow2:
                if assigned[v]:
                    margin -= c << values[v]
                elif v == lhs:
                    pass  # handled with the lhs endpoint scan below
                else:
                    margin -= c  # 2**0 is the optimistic floor
            self_pow2 = sum(c for v, c in pow2 if v == lhs and not assigned[lhs])
            if assigned[lhs]:
                margin += self_coeff * values[lhs]
            else:
                # self_coeff*x - self_pow2*2**x is concave; its integer
                # maximum over [0, bound] sits at 0, 1 or the bound.
                margin += max(self_coeff * x - (self_pow2 << x)
                              for x in (0, 1, bound))
            if margin >= 0:
                return True
        return False

    def descend(depth: int) -> bool:
        if depth == n:
            return True
        var = order[depth]
        assigned[var] = True
        for value in range(bound + 1):
            values[var] = value
            if all(feasible(idx) for idx in involve[depth]) and descend(depth + 1):
                return True
        assigned[var] = False
        values[var] = 0
        return False

    if not all(feasible(idx) for idx in range(len(ineqs))):
        return OracleResult(NO_SOLUTION, None, bound)
    if descend(0):
        return OracleResult(SAT, tuple(values), bound)
    return OracleResult(NO_SOLUTION, None, bound)


def _connectivity_order(n: int, members: list[frozenset[int]]) -> list[int]:
    """Constrained variables first, grouped so each picked variable shares as
    many inequalities as possible with the already-picked ones."""
    degree = [0] * n
    for group in members:
        for v in group:
            degree[v] += 1
    order: list[int] = []
    picked = [False] * n
    pool = {v for v in range(n) if degree[v] > 0}
    while pool:
        best = max(pool, key=lambda v: (
            sum(1 for g in members if v in g and any(picked[w] for w in g)),
            degree[v], -v))
        order.append(best)
        picked[best] = True
        pool.remove(best)
    order.extend(v for v in range(n) if degree[v] == 0)
    return order
