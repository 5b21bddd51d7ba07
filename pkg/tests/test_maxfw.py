"""Maximum-path-weight solving of difference components."""

from random import Random

import pytest

from firwidth.maxfw import (NEG_INF, NotNonexpansive, PositiveCycle,
                            WeightedGraph, build_weighted, least_from_distances,
                            max_floyd_warshall)
from randsys import brute_max_path
from sample_systems import T, difference_cycle, seven_var_mixed


def _graph(n, edges):
    return WeightedGraph(tuple(range(n)), edges)


class TestBuildWeighted:
    def test_difference_cycle(self):
        s = difference_cycle()
        g, floors = build_weighted([0, 1, 2], list(s.inequalities()))
        assert sorted(g.edges) == [(0, 1, 1), (1, 0, 2), (2, -1, 0)]
        assert floors == [2, 0, 0]

    def test_constant_only(self):
        from firwidth import ConstraintSystem
        s = ConstraintSystem(["x"])
        s.add_terms(0, T(7))
        g, floors = build_weighted([0], list(s.inequalities()))
        assert g.edges == [] and floors == [7]

    def test_inner_component_after_substitution(self):
        from firwidth.solve import _component_ineqs
        s = seven_var_mixed()
        comp = (2, 4, 5)  # x3, x5, x6 with x4 already pinned at 1
        ineqs = _component_ineqs(s, comp, {3: 1})
        g, floors = build_weighted(comp, ineqs)
        assert sorted(g.edges) == [(0, 0, 2), (1, 1, 0), (2, -1, 1)]
        assert floors == [1, 2, 0]

    def test_weight_two_rejected(self):
        from firwidth import ConstraintSystem
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, T(0, {1: 2}))
        with pytest.raises(NotNonexpansive):
            build_weighted([0, 1], list(s.inequalities()))


class TestMaxDistances:
    def test_cycle_matrix(self):
        g = _graph(3, [(0, 1, 1), (1, 0, 2), (2, -1, 0)])
        assert max_floyd_warshall(g) == [[0, 1, 1], [-1, 0, 0], [-1, 0, 0]]

    def test_positive_cycle_detected(self):
        g = _graph(2, [(0, 1, 1), (1, 0, 0)])
        assert isinstance(max_floyd_warshall(g), PositiveCycle)

    def test_positive_self_loop(self):
        g = _graph(1, [(0, 1, 0)])
        assert isinstance(max_floyd_warshall(g), PositiveCycle)

    def test_no_edges(self):
        dist = max_floyd_warshall(_graph(2, []))
        assert dist == [[0, NEG_INF], [NEG_INF, 0]]

    def test_matches_brute_force_path_enumeration(self):
        rng = Random(31)
        cycles = 0
        for _ in range(300):
            n = rng.randint(1, 6)
            edges = []
            for _ in range(rng.randint(0, 9)):
                edges.append((rng.randrange(n), rng.randint(-5, 5), rng.randrange(n)))
            mine = max_floyd_warshall(_graph(n, edges))
            ref, has_pos = brute_max_path(n, [(s, w, d) for s, w, d in edges])
            if has_pos:
                cycles += 1
                assert isinstance(mine, PositiveCycle)
            else:
                assert not isinstance(mine, PositiveCycle)
                expected = [[ref[i][j] if ref[i][j] is not None else NEG_INF
                             for j in range(n)] for i in range(n)]
                assert mine == expected
        assert cycles > 20  # the sample exercised both verdicts


class TestLeast:
    def test_cycle_least(self):
        g = _graph(3, [(0, 1, 1), (1, 0, 2), (2, -1, 0)])
        dist = max_floyd_warshall(g)
        assert least_from_distances(dist, [2, 0, 0]) == [2, 1, 1]

    def test_inner_component_least(self):
        dist = max_floyd_warshall(_graph(3, [(1, 1, 0), (2, -1, 1), (0, 0, 2)]))
        assert dist == [[0, -1, 0], [1, 0, 1], [0, -1, 0]]
        assert least_from_distances(dist, [1, 2, 0]) == [1, 2, 1]

    def test_no_edges_floor_only(self):
        dist = max_floyd_warshall(_graph(1, []))
        assert least_from_distances(dist, [7]) == [7]

    def test_output_is_least_against_box_search(self):
        from firwidth import ConstraintSystem
        from firwidth.oracle import exhaustive_least
        rng = Random(32)
        produced = 0
        while produced < 60:
            n = rng.randint(1, 4)
            s = ConstraintSystem([f"x{i}" for i in range(n)])
            for _ in range(rng.randint(1, 5)):
                if rng.random() < 0.3:
                    s.add_terms(rng.randrange(n), T(rng.randint(0, 6)))
                else:
                    s.add_terms(rng.randrange(n),
                                T(rng.randint(-4, 4), {rng.randrange(n): 1}))
            g, floors = build_weighted(list(range(n)), list(s.inequalities()))
            dist = max_floyd_warshall(g)
            box = exhaustive_least(s, 40)
            if isinstance(dist, PositiveCycle):
                assert not box.sat
                continue
            produced += 1
            assert box.values == tuple(least_from_distances(dist, floors))
