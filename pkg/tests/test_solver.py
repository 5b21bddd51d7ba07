"""End-to-end solving: component ordering, substitution, disjunct merging."""

from random import Random

import pytest

from firwidth import (ALL_DISJUNCTS_UNSAT, BOUND_CONFLICT, POSITIVE_CYCLE,
                      AffineTerm, BoundCheck, Const, ConstraintSystem,
                      UnsupportedDynamicShift, Var, failed_checks,
                      pointwise_min, solve, solve_conjunctive, substitute)
from firwidth.oracle import exhaustive_least, kleene_least
from randsys import random_system
from sample_systems import (T, acyclic_chain, difference_cycle,
                            doubling_unsat, seven_var_mixed, three_var_cycle,
                            two_var_unique)


class TestConjunctive:
    def test_seven_var_mixed(self):
        res = solve_conjunctive(seven_var_mixed())
        assert res.sat and res.values == (0, 1, 1, 1, 2, 1, 1)

    def test_acyclic_forward_substitution(self):
        res = solve_conjunctive(acyclic_chain())
        assert res.values == (5, 2, 7, 11)
        assert kleene_least(acyclic_chain()).values == (5, 2, 7, 11)

    def test_doubling_unsat(self):
        res = solve_conjunctive(doubling_unsat())
        assert not res.sat
        assert res.reason in (BOUND_CONFLICT,)
        assert res.component == (0,)

    def test_unique_solution(self):
        res = solve_conjunctive(two_var_unique())
        assert res.values == (0, 1)

    def test_positive_cycle_reason(self):
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, T(1, {1: 1}))
        s.add_terms(1, T(0, {0: 1}))
        res = solve_conjunctive(s)
        assert not res.sat and res.reason == POSITIVE_CYCLE
        assert res.component == (0, 1)

    def test_unconstrained_variables_get_zero(self):
        s = ConstraintSystem(["a", "b", "c"])
        s.add_terms(1, T(3))
        assert solve_conjunctive(s).values == (0, 3, 0)

    def test_cyclic_pow2_rejected(self):
        s = ConstraintSystem(["x"])
        s.add_terms(0, AffineTerm.make(0, {}, {0: 1}))
        with pytest.raises(UnsupportedDynamicShift):
            solve_conjunctive(s)

    def test_acyclic_pow2_folded(self):
        # y >= x + 2**v - 1 with v pinned by v >= 3 in a later component
        s = ConstraintSystem(["y", "x", "v"])
        s.add_terms(0, AffineTerm.make(-1, {1: 1}, {2: 1}))
        s.add_terms(1, T(4))
        s.add_terms(2, T(3))
        assert solve_conjunctive(s).values == (11, 4, 3)


class TestSubstitute:
    def test_single_variable(self):
        s = ConstraintSystem(["x4", "x2"])
        s.add_terms(0, T(0, {1: 1}))
        out = substitute(s, {1: 1})
        (q,) = out.inequalities()
        assert q.alternatives == (T(1),)

    def test_pow2_folds_to_constant(self):
        s = ConstraintSystem(["x", "y", "v"])
        s.add_terms(0, AffineTerm.make(-1, {1: 1}, {2: 1}))
        out = substitute(s, {2: 3})
        (q,) = out.inequalities()
        assert q.alternatives == (T(7, {1: 1}),)

    def test_empty_substitution_is_identity(self):
        s = three_var_cycle()
        assert substitute(s, {}).render() == s.render()

    def test_partial_solve_matches_full_solve(self):
        # Solving later components and folding them in never changes the rest.
        rng = Random(77)
        checked = 0
        while checked < 40:
            s = random_system(rng, max_vars=5, max_alts=1)
            res = solve_conjunctive(s)
            if not res.sat:
                continue
            checked += 1
            v = rng.randrange(s.num_vars)
            folded = substitute(s, {v: res.values[v]})
            res2 = solve_conjunctive(folded)
            assert res2.sat and res2.values[:v] + res2.values[v + 1:] == \
                res.values[:v] + res.values[v + 1:]


class TestDisjunctMerge:
    def test_min_takes_componentwise_minimum(self):
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, T(5), T(10, {1: 1}))
        s.add_terms(1, T(0))
        res = solve(s)
        assert res.values == (5, 0)

    def test_min_free_equals_conjunctive(self):
        for build in (three_var_cycle, difference_cycle, acyclic_chain):
            assert solve(build()).values == solve_conjunctive(build()).values

    def test_all_disjuncts_unsat(self):
        s = ConstraintSystem(["x"])
        s.add_terms(0, T(1, {0: 2}), T(2, {0: 2}))
        res = solve(s)
        assert not res.sat and res.reason == ALL_DISJUNCTS_UNSAT

    def test_single_disjunct_keeps_reason(self):
        res = solve(doubling_unsat())
        assert not res.sat and res.reason == BOUND_CONFLICT

    def test_merge_can_beat_every_single_disjunct(self):
        # Alternatives favor different coordinates; the merged least solution
        # is below both disjunct solutions.
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, T(3), T(0, {1: 1}))
        s.add_terms(1, T(2), T(0, {0: 1}))
        per_disjunct = [r.values for r in map(solve_conjunctive, s.disjuncts())
                        if r.sat]
        merged = solve(s).values
        assert merged == (0, 0)
        assert all(merged == pointwise_min(merged, v) for v in per_disjunct)
        assert merged not in per_disjunct  # strictly better than any one route


class TestAgainstOracles:
    def test_verdicts_and_values_match(self):
        rng = Random(2026)
        sat = unsat = 0
        for _ in range(400):
            s = random_system(rng)
            res = solve(s)
            ora = kleene_least(s, cutoff=10 ** 6)
            if res.sat:
                sat += 1
                assert ora.sat and ora.values == res.values
                assert s.satisfied_by(res.values)
            else:
                unsat += 1
                assert not ora.sat
                assert not exhaustive_least(s, 50).sat
        assert sat > 100 and unsat > 30  # both verdicts well represented


class TestChecks:
    def test_failed_checks_reported(self):
        checks = [BoundCheck(4, Var(0), "out is 4 bits"),
                  BoundCheck(9, Var(0), "wide enough")]
        assert failed_checks(checks, (7,)) == [checks[0]]

    def test_constant_check(self):
        assert failed_checks([BoundCheck(3, Const(5), "")], ()) != []
