"""Dependency graph of a conjunctive system and its SCC decomposition.

Each single-alternative inequality ``l: x >= a0 + sum(aj * xj) + sum(c * 2**y)``
contributes one labeled, weighted edge ``x -> xj`` per linear variable with
``aj > 0`` and one exponential edge ``x -> y`` per ``2**y`` addend.  Components
are ordered topologically (edges only go from earlier to later components),
so solving proceeds from the last component backwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .constraints import ConstraintSystem


class NotConjunctive(Exception):
    """The system still contains multi-alternative inequalities."""


class UnsupportedDynamicShift(Exception):
    """A ``2**y`` addend refers to a variable inside its own dependency cycle,
    which is outside the supported dynamic-shift forms (constant shift amount,
    or a shift amount resolvable before its user)."""


@dataclass(frozen=True)
class DepEdge:
    src: int
    label: int
    weight: int
    dst: int
    via_exp: bool = False


class DepGraph:
    def __init__(self, num_vars: int, edges: Sequence[DepEdge]):
        self.num_vars = num_vars
        self.edges = list(edges)
        self.out: list[list[DepEdge]] = [[] for _ in range(num_vars)]
        for e in self.edges:
            self.out[e.src].append(e)

    def internal_edges(self, component: Sequence[int]) -> list[DepEdge]:
        members = set(component)
        return [e for v in component for e in self.out[v] if e.dst in members]


def build_graph(sys: ConstraintSystem) -> DepGraph:
    edges = []
    for ineq in sys.inequalities():
        if len(ineq.alternatives) != 1:
            raise NotConjunctive(f"inequality {ineq.label} has {len(ineq.alternatives)} alternatives")
        alt = ineq.alternatives[0]
        for var, coeff in alt.coeffs:
            edges.append(DepEdge(ineq.lhs, ineq.label, coeff, var))
        for var, _coeff in alt.pow2:
            edges.append(DepEdge(ineq.lhs, ineq.label, 1, var, via_exp=True))
    return DepGraph(sys.num_vars, edges)


@dataclass
class SccDecomposition:
    components: list[tuple[int, ...]]
    component_of: list[int]


def tarjan_scc(graph: DepGraph) -> SccDecomposition:
    """Strongly connected components, topologically sorted.

    Iterative Tarjan (industrial systems reach thousands of vertices, beyond
    any sane recursion limit), visiting vertices in index order so the result
    is deterministic.  Tarjan finishes sink components first; reversing its
    output yields the topological order of the condensation.
    """
    n = graph.num_vars
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    components: list[tuple[int, ...]] = []

    for root in range(n):
        if index[root] != -1:
            continue
        # Frames: (vertex, iterator position over out-edges).
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            out = graph.out[v]
            while pos < len(out):
                w = out[pos].dst
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    components.reverse()
    component_of = [0] * n
    for i, comp in enumerate(components):
        for v in comp:
            component_of[v] = i
    return SccDecomposition(components, component_of)


def is_trivial(graph: DepGraph, component: Sequence[int]) -> bool:
    """A component with no internal edge (a self-loop makes a singleton
    nontrivial)."""
    return not graph.internal_edges(component)


def is_expansive(graph: DepGraph, component: Sequence[int]) -> bool:
    """True when some internal edge has weight > 1 or two distinct internal
    edges leave the same vertex under the same label; trivial components are
    nonexpansive.  Internal exponential edges are rejected outright."""
    internal = graph.internal_edges(component)
    seen_label: set[tuple[int, int]] = set()
    for e in internal:
        if e.via_exp:
            raise UnsupportedDynamicShift(
                f"2**x{e.dst} feeds back into its own dependency cycle")
        if e.weight > 1:
            return True
        key = (e.src, e.label)
        if key in seen_label:
            return True
        seen_label.add(key)
    return False


def to_dot(graph: DepGraph, names: Sequence[str]) -> str:
    """Graphviz dump; edge labels read ``l{label}/w{weight}``."""
    lines = ["digraph widths {"]
    for v in range(graph.num_vars):
        lines.append(f'  "{names[v]}";')
    for e in graph.edges:
        style = ", style=dashed" if e.via_exp else ""
        lines.append(f'  "{names[e.src]}" -> "{names[e.dst]}" [label="l{e.label}/w{e.weight}"{style}];')
    lines.append("}")
    return "\n".join(lines)
