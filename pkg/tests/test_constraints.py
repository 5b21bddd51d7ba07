"""Terms, normalization, satisfaction, disjunct expansion."""

import itertools
from random import Random

import pytest

from firwidth import (Add, AffineTerm, Const, ConstraintSystem, Exp2,
                      MalformedExpr, Max, Min, MinInequality, Var, eval_expr,
                      normal_form, pointwise_min, solve)
from randsys import random_system
from sample_systems import T, three_var_cycle, two_var_unique


class TestAffineTerm:
    def test_evaluate_linear(self):
        # -4 + 2*x2 at (0, 1, 2)
        assert T(-4, {1: 2}).evaluate((0, 1, 2)) == -2

    def test_evaluate_empty(self):
        assert T().evaluate((7, 8)) == 0

    def test_evaluate_with_pow2(self):
        # -1 + x0 + 2**x1 at x0=3, x1=2
        term = AffineTerm.make(-1, {0: 1}, {1: 1})
        assert term.evaluate((3, 2)) == 6

    def test_zero_coefficients_dropped(self):
        term = AffineTerm.make(5, {0: 0, 1: 2}, {2: 0})
        assert term.coeffs == ((1, 2),)
        assert term.pow2 == ()

    def test_negative_coefficient_rejected(self):
        with pytest.raises(MalformedExpr):
            AffineTerm.make(0, {0: -1})

    def test_add_merges(self):
        total = T(1, {0: 1}) + T(2, {0: 2, 1: 1})
        assert total == AffineTerm.make(3, {0: 3, 1: 1})

    def test_substitute_folds_pow2(self):
        term = AffineTerm.make(-1, {0: 1}, {1: 2})
        assert term.substitute({1: 3}) == AffineTerm.make(15, {0: 1})


class TestNormalize:
    def _system(self, nvars):
        return ConstraintSystem([f"x{i}" for i in range(nvars)])

    def test_max_plus_one_splits(self):
        # x >= max(y - 1, 4) + 1  becomes  x >= y  and  x >= 5
        s = self._system(2)
        added = s.add(0, Add(Max(Add(Var(1), Const(-1)), Const(4)), Const(1)))
        assert [q.alternatives for q in added] == [
            (AffineTerm.make(0, {1: 1}),), (AffineTerm.make(5),)]

    def test_constant(self):
        s = self._system(1)
        (q,) = s.add(0, Const(0))
        assert q.alternatives == (T(0),)

    def test_min_distributes_over_max(self):
        # x >= min(max(a, b), c)  becomes  x >= min(a, c) and x >= min(b, c)
        a, b, c = Var(1), Var(2), Var(3)
        groups = normal_form(Min(Max(a, b), c))
        assert groups == [
            [AffineTerm.make(0, {1: 1}), AffineTerm.make(0, {3: 1})],
            [AffineTerm.make(0, {2: 1}), AffineTerm.make(0, {3: 1})],
        ]
        # both forms agree on every point of a small box
        for pt in itertools.product(range(5), repeat=4):
            direct = pt[0] >= min(max(pt[1], pt[2]), pt[3])
            rewritten = all(pt[0] >= min(t.evaluate(pt) for t in g) for g in groups)
            assert direct == rewritten

    def test_exp2_constant_folds(self):
        assert normal_form(Exp2(Const(3))) == [[T(8)]]

    def test_exp2_variable_survives(self):
        assert normal_form(Exp2(Var(0))) == [[AffineTerm.make(0, {}, {0: 1})]]

    def test_exp2_compound_rejected(self):
        with pytest.raises(MalformedExpr):
            normal_form(Exp2(Add(Var(0), Const(1))))

    def test_random_trees_match_direct_evaluation(self):
        rng = Random(20260810)
        for _ in range(200):
            nvars = rng.randint(1, 4)
            expr = _random_expr(rng, nvars, depth=3)
            groups = normal_form(expr)
            for pt in itertools.product(range(3), repeat=nvars):
                value = eval_expr(expr, pt)
                for lhs_value in range(6):
                    holds = all(lhs_value >= min(t.evaluate(pt) for t in g)
                                for g in groups)
                    assert holds == (lhs_value >= value)


def _random_expr(rng, nvars, depth):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var(rng.randrange(nvars))
        return Const(rng.randint(-4, 4))
    kind = rng.choice(["add", "min", "max", "exp"])
    if kind == "exp":
        if rng.random() < 0.5:
            return Exp2(Var(rng.randrange(nvars)))
        return Exp2(Const(rng.randint(0, 3)))
    left = _random_expr(rng, nvars, depth - 1)
    right = _random_expr(rng, nvars, depth - 1)
    return {"add": Add, "min": Min, "max": Max}[kind](left, right)


class TestSatisfies:
    def test_unique_solution_accepted(self):
        assert two_var_unique().first_violation((0, 1)) is None

    def test_first_violation_in_order(self):
        bad = two_var_unique().first_violation((0, 0))
        assert bad is not None and bad.lhs == 1

    def test_empty_system_vacuous(self):
        s = ConstraintSystem(["a", "b"])
        assert s.satisfied_by((0, 0))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            two_var_unique().satisfied_by((0,))


class TestDisjuncts:
    def test_binary_min_splits_in_source_order(self):
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, T(0, {1: 1}), T(7))
        subs = list(s.disjuncts())
        assert len(subs) == 2
        assert next(subs[0].inequalities()).alternatives == (T(0, {1: 1}),)
        assert next(subs[1].inequalities()).alternatives == (T(7),)

    def test_conjunctive_passthrough(self):
        s = three_var_cycle()
        (only,) = list(s.disjuncts())
        assert only.render() == s.render()

    def test_product_count(self):
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, T(1), T(2))
        s.add_terms(1, T(1), T(2), T(3))
        assert sum(1 for _ in s.disjuncts()) == 6

    def test_lazy(self):
        s = ConstraintSystem(["x"])
        for _ in range(20):
            s.add_terms(0, T(0), T(1))
        gen = s.disjuncts()
        next(gen)  # a million-element product must not be materialized

    def test_point_satisfies_iff_some_disjunct_does(self):
        rng = Random(7)
        for _ in range(40):
            s = random_system(rng, max_vars=3, max_ineqs=4)
            subs = list(s.disjuncts())
            for pt in itertools.product(range(4), repeat=s.num_vars):
                assert s.satisfied_by(pt) == any(d.satisfied_by(pt) for d in subs)


class TestPointwiseMin:
    def test_componentwise(self):
        assert pointwise_min((3, 1), (1, 3)) == (1, 1)

    def test_idempotent(self):
        assert pointwise_min((2, 5), (2, 5)) == (2, 5)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pointwise_min((1,), (1, 2))

    def test_min_of_two_solutions_solves_cycle_system(self):
        s = three_var_cycle()
        hi, lo = (3, 3, 4), (1, 1, 2)
        assert s.satisfied_by(hi) and s.satisfied_by(lo)
        merged = pointwise_min(hi, lo)
        assert merged == (1, 1, 2) and s.satisfied_by(merged)

    def test_min_closure_on_random_systems(self):
        rng = Random(99)
        produced = 0
        while produced < 60:
            s = random_system(rng, max_vars=4, max_ineqs=5)
            res = solve(s)
            if not res.sat:
                continue
            produced += 1
            base = res.values
            for _ in range(10):
                a = tuple(v + rng.randint(0, 4) for v in base)
                b = tuple(v + rng.randint(0, 4) for v in base)
                if s.satisfied_by(a) and s.satisfied_by(b):
                    assert s.satisfied_by(pointwise_min(a, b))
