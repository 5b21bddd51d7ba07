"""CPLEX-LP emission for cross-checking against external ILP solvers.

Each disjunct of the system becomes one LP file minimizing the sum of all
variables subject to ``x - sum(aj * xj) >= a0``; because a satisfiable system
has a unique least solution, that single objective recovers exactly the
per-variable minima.  Min-alternatives are handled by emitting one file per
disjunct instead of a big-M encoding, so no solver-specific constant has to
be picked.
"""

from __future__ import annotations

import re
from typing import Iterator, Sequence

from .constraints import ConstraintSystem


class LpUnsupported(Exception):
    """The system contains constructs the LP text format cannot express."""


def sanitize_names(names: Sequence[str]) -> list[str]:
    """LP-safe variable names: alphanumeric/underscore, not starting with a
    digit, unique."""
    out, used = [], set()
    for name in names:
        clean = re.sub(r"[^A-Za-z0-9_]", "_", name)
        if not clean or clean[0].isdigit():
            clean = "v_" + clean
        base, k = clean, 1
        while clean in used:
            k += 1
            clean = f"{base}_{k}"
        used.add(clean)
        out.append(clean)
    return out


def lp_text(disjunct: ConstraintSystem, names: Sequence[str], index: int) -> str:
    lines = [f"\\ disjunct {index}", "Minimize"]
    lines.append(" obj: " + (" + ".join(names) if names else "0"))
    lines.append("Subject To")
    for ineq in disjunct.inequalities():
        (alt,) = ineq.alternatives
        if alt.pow2:
            raise LpUnsupported("2**x terms cannot be written in LP format")
        lhs_parts = [names[ineq.lhs]]
        for var, coeff in alt.coeffs:
            lhs_parts.append(f"- {coeff} {names[var]}")
        lines.append(f" c{ineq.label}: " + " ".join(lhs_parts) + f" >= {alt.const}")
    lines.append("Generals")
    lines.append(" " + " ".join(names))
    lines.append("End")
    return "\n".join(lines) + "\n"


def lp_files(sys: ConstraintSystem) -> Iterator[str]:
    """One LP document per disjunct, in the deterministic disjunct order."""
    names = sanitize_names(sys.names)
    for index, disjunct in enumerate(sys.disjuncts()):
        yield lp_text(disjunct, names, index)
