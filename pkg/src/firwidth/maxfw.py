"""Least solution of a nonexpansive component via maximum path weights.

After substituting already-solved variables, every inequality of a
nonexpansive component is either ``x >= c + y`` (a weighted edge) or
``x >= c`` (a per-vertex floor).  Running Floyd-Warshall with (max, +) in
place of (min, +) yields all-pairs maximum path weights; a positive diagonal
entry exposes a positive-weight cycle, i.e. an unsatisfiable component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .constraints import MinInequality

NEG_INF = float("-inf")


class NotNonexpansive(Exception):
    """An inequality of the component is not a difference constraint."""


@dataclass(frozen=True)
class PositiveCycle:
    """Witness that some vertex lies on a cycle of positive total weight."""

    vertex: int


@dataclass
class WeightedGraph:
    vertices: tuple[int, ...]              # original variable ids, matrix order
    edges: list[tuple[int, int, int]]      # (src, weight, dst) in local indices


def build_weighted(component: Sequence[int], ineqs: Sequence[MinInequality],
                   ) -> tuple[WeightedGraph, list[int]]:
    """Split a component's inequalities into difference edges and the
    per-vertex constant floor ``v`` (the maximum of 0 and the constants of the
    purely-constant inequalities)."""
    local = {v: i for i, v in enumerate(component)}
    floors = [0] * len(component)
    edges = []
    for ineq in ineqs:
        (alt,) = ineq.alternatives
        if alt.pow2:
            raise NotNonexpansive(f"inequality {ineq.label} contains a 2**x addend")
        if not alt.coeffs:
            i = local[ineq.lhs]
            floors[i] = max(floors[i], alt.const)
        elif len(alt.coeffs) == 1 and alt.coeffs[0][1] == 1:
            var = alt.coeffs[0][0]
            edges.append((local[ineq.lhs], alt.const, local[var]))
        else:
            raise NotNonexpansive(f"inequality {ineq.label} is not a difference constraint")
    return WeightedGraph(tuple(component), edges), floors


def max_floyd_warshall(graph: WeightedGraph) -> list[list] | PositiveCycle:
    """All-pairs maximum path weights, or a PositiveCycle witness.

    The matrix starts with 0 on the diagonal (empty path), the maximum
    parallel-edge weight between connected pairs, and -inf elsewhere; -inf
    absorbs under + and loses under max, so unreachable pairs stay -inf.
    The scan exits as soon as any diagonal entry turns positive.
    """
    n = len(graph.vertices)
    dist: list[list] = [[NEG_INF] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = 0
    for src, weight, dst in graph.edges:
        if weight > dist[src][dst]:
            dist[src][dst] = weight
    for i in range(n):
        if dist[i][i] > 0:
            return PositiveCycle(graph.vertices[i])
    for k in range(n):
        row_k = dist[k]
        for i in range(n):
            row_i = dist[i]
            via = row_i[k]
            if via == NEG_INF:
                continue
            for j in range(n):
                cand = via + row_k[j]
                if cand > row_i[j]:
                    row_i[j] = cand
            if row_i[i] > 0:
                return PositiveCycle(graph.vertices[i])
    return dist


def least_from_distances(dist: list[list], floors: Sequence[int]) -> list[int]:
    """Least values: each vertex takes the best of its own floor and
    ``max path weight + floor`` over reachable vertices."""
    n = len(floors)
    out = []
    for i in range(n):
        best = floors[i]
        row = dist[i]
        for j in range(n):
            if row[j] != NEG_INF:
                cand = row[j] + floors[j]
                if cand > best:
                    best = cand
        out.append(best)
    return out
