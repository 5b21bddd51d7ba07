"""Dependency graph construction, SCC order, expansiveness classification."""

from random import Random

import pytest

from firwidth import (AffineTerm, ConstraintSystem, NotConjunctive,
                      UnsupportedDynamicShift, build_graph, is_expansive,
                      is_trivial, solve, tarjan_scc, to_dot)
from firwidth.oracle import exhaustive_least
from randsys import brute_sccs, random_conjunctive, random_strongly_connected
from sample_systems import T, acyclic_chain, seven_var_mixed, three_var_cycle


class TestBuildGraph:
    def test_cycle_edges_and_weights(self):
        g = build_graph(three_var_cycle())
        triples = sorted((e.src, e.dst, e.weight) for e in g.edges)
        assert triples == [(0, 1, 2), (1, 2, 1), (2, 0, 1)]

    def test_acyclic(self):
        g = build_graph(acyclic_chain())
        comp = tarjan_scc(g)
        assert all(len(c) == 1 for c in comp.components)
        assert not any(e.src == e.dst for e in g.edges)

    def test_constant_only_no_edges(self):
        s = ConstraintSystem(["x"])
        s.add_terms(0, T(5))
        assert build_graph(s).edges == []

    def test_pow2_edge_flagged(self):
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, AffineTerm.make(0, {}, {1: 1}))
        (e,) = build_graph(s).edges
        assert e.via_exp and e.weight == 1 and (e.src, e.dst) == (0, 1)

    def test_multi_alternative_rejected(self):
        s = ConstraintSystem(["x"])
        s.add_terms(0, T(1), T(2))
        with pytest.raises(NotConjunctive):
            build_graph(s)


class TestTarjan:
    def test_topological_component_order(self):
        s = seven_var_mixed()
        comp = tarjan_scc(build_graph(s))
        names = [tuple(s.names[v] for v in c) for c in comp.components]
        assert names == [("x7",), ("x3", "x5", "x6"), ("x4",), ("x1", "x2")]

    def test_single_vertex(self):
        comp = tarjan_scc(build_graph(ConstraintSystem(["x"])))
        assert comp.components == [(0,)]

    def test_cycle_is_one_component(self):
        comp = tarjan_scc(build_graph(three_var_cycle()))
        assert comp.components == [(0, 1, 2)]

    def test_edges_respect_component_order(self):
        rng = Random(5)
        for _ in range(100):
            s = random_conjunctive(rng, max_vars=8)
            g = build_graph(s)
            comp = tarjan_scc(g)
            for e in g.edges:
                assert comp.component_of[e.src] <= comp.component_of[e.dst]

    def test_matches_reachability_closure(self):
        rng = Random(6)
        for _ in range(100):
            s = random_conjunctive(rng, max_vars=8)
            g = build_graph(s)
            mine = {frozenset(c) for c in tarjan_scc(g).components}
            ref = brute_sccs(s.num_vars, [(e.src, e.dst) for e in g.edges])
            assert mine == ref

    def test_deep_graph_is_iterative(self):
        # A recursive Tarjan would blow the interpreter stack here.
        n = 30000
        s = ConstraintSystem([f"x{i}" for i in range(n)])
        for i in range(n - 1):
            s.add_terms(i, T(0, {i + 1: 1}))
        comp = tarjan_scc(build_graph(s))
        assert len(comp.components) == n


class TestExpansive:
    def test_heavy_edge(self):
        g = build_graph(three_var_cycle())
        assert is_expansive(g, (0, 1, 2))

    def test_difference_component_is_not(self):
        s = seven_var_mixed()
        g = build_graph(s)
        comp = tarjan_scc(g)
        x3_component = comp.components[1]
        assert tuple(s.names[v] for v in x3_component) == ("x3", "x5", "x6")
        assert not is_expansive(g, x3_component)

    def test_trivial_component(self):
        s = ConstraintSystem(["x"])
        g = build_graph(s)
        assert is_trivial(g, (0,)) and not is_expansive(g, (0,))

    def test_fanout_same_inequality(self):
        # x >= y + z closes two cycles through one inequality
        s = ConstraintSystem(["x", "y", "z"])
        s.add_terms(0, T(0, {1: 1, 2: 1}))
        s.add_terms(1, T(0, {0: 1}))
        s.add_terms(2, T(0, {0: 1}))
        g = build_graph(s)
        assert is_expansive(g, (0, 1, 2))

    def test_self_loop_not_trivial(self):
        s = ConstraintSystem(["x"])
        s.add_terms(0, T(-1, {0: 1}))
        g = build_graph(s)
        assert not is_trivial(g, (0,)) and not is_expansive(g, (0,))

    def test_internal_pow2_rejected(self):
        s = ConstraintSystem(["x", "y"])
        s.add_terms(0, AffineTerm.make(0, {}, {1: 1}))
        s.add_terms(1, T(0, {0: 1}))
        g = build_graph(s)
        with pytest.raises(UnsupportedDynamicShift):
            is_expansive(g, (0, 1))


class TestBoundedness:
    """Expansive components trap all solutions under the derived ceiling;
    nonexpansive ones let solutions shift upward uniformly."""

    def test_expansive_solutions_bounded(self):
        from firwidth.bab import lower_bounds, upper_bounds
        rng = Random(13)
        checked = 0
        while checked < 25:
            s = random_strongly_connected(rng, rng.randint(2, 3),
                                          max_coeff=2, const_range=(-4, 2))
            g = build_graph(s)
            comp = tarjan_scc(g).components
            if len(comp) != 1:
                continue
            try:
                if not is_expansive(g, comp[0]):
                    continue
            except UnsupportedDynamicShift:
                continue
            res = solve(s)
            if not res.sat:
                continue
            checked += 1
            ub = upper_bounds(comp[0], list(s.inequalities()))
            for point in _solutions_within(s, 20):
                assert all(p <= b for p, b in zip(point, ub))

    def test_nonexpansive_solutions_shift(self):
        rng = Random(14)
        checked = 0
        while checked < 25:
            s = random_strongly_connected(rng, rng.randint(2, 4), max_coeff=1)
            g = build_graph(s)
            components = tarjan_scc(g).components
            if len(components) != 1 or is_expansive(g, components[0]):
                continue
            res = solve(s)
            if not res.sat:
                continue
            checked += 1
            for shift in (1, 5, 17):
                lifted = tuple(v + shift for v in res.values)
                assert s.satisfied_by(lifted)


def _solutions_within(sys, bound):
    import itertools
    for pt in itertools.product(range(bound + 1), repeat=sys.num_vars):
        if sys.satisfied_by(pt):
            yield pt


class TestDot:
    def test_edge_labels(self):
        out = to_dot(build_graph(three_var_cycle()), ["x1", "x2", "x3"])
        assert '"x1" -> "x2" [label="l0/w2"];' in out
        assert out.startswith("digraph")
