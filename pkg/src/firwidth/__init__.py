"""Width inference for FIRRTL circuits.

The library solves conjunctions of inequalities ``x >= min(t1, ..., tk)``
over nonnegative integers (the shape every FIRRTL width rule produces) for
their unique least solution, and ships a FIRRTL frontend that extracts such
systems from source text and writes the inferred widths back.
"""

from .constraints import (Add, AffineTerm, Assignment, BoundCheck, Const,
                          ConstraintSystem, Exp2, MalformedExpr, Max, Min,
                          MinInequality, Var, WidthExpr, eval_expr,
                          normal_form, pointwise_min)
from .depgraph import (DepEdge, DepGraph, NotConjunctive, SccDecomposition,
                       UnsupportedDynamicShift, build_graph, is_expansive,
                       is_trivial, tarjan_scc, to_dot)
from .oracle import OracleResult, exhaustive_least, kleene_least
from .solve import (ALL_DISJUNCTS_UNSAT, BOUND_CONFLICT, CONSTANT_CONFLICT,
                    POSITIVE_CYCLE, SEARCH_EXHAUSTED, InternalInvariantError,
                    SolveResult, failed_checks, solve, solve_conjunctive,
                    substitute)
from .textfmt import FormatError, parse_text, render_text

__all__ = [
    "AffineTerm", "Assignment", "BoundCheck", "ConstraintSystem",
    "MinInequality", "WidthExpr", "Var", "Const", "Add", "Min", "Max", "Exp2",
    "MalformedExpr", "eval_expr", "normal_form", "pointwise_min",
    "DepGraph", "DepEdge", "SccDecomposition", "NotConjunctive",
    "UnsupportedDynamicShift", "build_graph", "tarjan_scc", "is_expansive",
    "is_trivial", "to_dot",
    "SolveResult", "solve", "solve_conjunctive", "substitute", "failed_checks",
    "InternalInvariantError", "POSITIVE_CYCLE", "BOUND_CONFLICT",
    "SEARCH_EXHAUSTED", "ALL_DISJUNCTS_UNSAT", "CONSTANT_CONFLICT",
    "OracleResult", "kleene_least", "exhaustive_least",
    "parse_text", "render_text", "FormatError",
]
