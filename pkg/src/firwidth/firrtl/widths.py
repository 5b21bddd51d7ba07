"""Ground-type and width computation for FIRRTL expressions.

``typed_width`` walks an expression and produces its result kind plus a
symbolic width expression (None for width-free kinds such as clocks).
References are resolved through a caller-supplied lookup so this module
stays independent of the leaf table representation.
"""

from __future__ import annotations

from typing import Callable

from ..constraints import Add, Const, Exp2, Max, Min, Var, WidthExpr
from .ast import Expr, MuxExpr, PrimOp, Ref, SIntLit, UIntLit

UINT = "uint"
SINT = "sint"
CLOCK = "clock"
RESET = "reset"
ASYNC_RESET = "asyncreset"

WIDTH_FREE = (CLOCK, RESET, ASYNC_RESET)

# resolve(ref) -> (kind, width expression or None for width-free kinds)
Resolver = Callable[[Ref], tuple[str, WidthExpr | None]]


class UnsupportedOp(Exception):
    pass


class WidthTypeError(Exception):
    """Operands have kinds the operator cannot take."""


def uint_literal_width(value: int) -> int:
    return max(1, value.bit_length())


def sint_literal_width(value: int) -> int:
    if value >= 0:
        return value.bit_length() + 1
    return (-value - 1).bit_length() + 1


def _shift(width: WidthExpr, amount: int) -> WidthExpr:
    return width if amount == 0 else Add(width, Const(-amount))


def typed_width(expr: Expr, resolve: Resolver) -> tuple[str, WidthExpr | None]:
    if isinstance(expr, UIntLit):
        width = expr.width if expr.width is not None else uint_literal_width(expr.value)
        return UINT, Const(width)
    if isinstance(expr, SIntLit):
        width = expr.width if expr.width is not None else sint_literal_width(expr.value)
        return SINT, Const(width)
    if isinstance(expr, Ref):
        return resolve(expr)
    if isinstance(expr, MuxExpr):
        kind1, w1 = typed_width(expr.high, resolve)
        kind2, w2 = typed_width(expr.low, resolve)
        if kind1 != kind2 or kind1 not in (UINT, SINT):
            raise WidthTypeError(f"mux branches have kinds {kind1}/{kind2}")
        assert w1 is not None and w2 is not None
        return kind1, Max(w1, w2)
    if isinstance(expr, PrimOp):
        return _primop_width(expr, resolve)
    raise UnsupportedOp(f"cannot compute a width for {expr!r}")


def _int_operands(expr: PrimOp, resolve: Resolver) -> list[tuple[str, WidthExpr]]:
    out = []
    for arg in expr.args:
        kind, width = typed_width(arg, resolve)
        if kind not in (UINT, SINT) or width is None:
            raise WidthTypeError(f"{expr.name} needs integer operands, got {kind}")
        out.append((kind, width))
    return out


def _primop_width(expr: PrimOp, resolve: Resolver) -> tuple[str, WidthExpr | None]:
    name = expr.name
    params = expr.params

    if name in ("asUInt", "asSInt"):
        kind, width = typed_width(expr.args[0], resolve)
        out_kind = UINT if name == "asUInt" else SINT
        if kind in WIDTH_FREE:
            return out_kind, Const(1)
        return out_kind, width
    if name == "asClock":
        return CLOCK, None

    ops = _int_operands(expr, resolve)
    if name in ("add", "sub"):
        (k1, w1), (_k2, w2) = ops
        return k1, Add(Max(w1, w2), Const(1))
    if name == "mul":
        (k1, w1), (_k2, w2) = ops
        return k1, Add(w1, w2)
    if name == "cat":
        (_k1, w1), (_k2, w2) = ops
        return UINT, Add(w1, w2)
    if name == "div":
        (k1, w1), _ = ops
        return k1, (w1 if k1 == UINT else Add(w1, Const(1)))
    if name in ("rem", "mod"):
        (k1, w1), (_k2, w2) = ops
        return k1, Min(w1, w2)
    if name == "pad":
        (k1, w1) = ops[0]
        (n,) = params
        if n < 0:
            raise WidthTypeError("pad amount must be nonnegative")
        return k1, Max(w1, Const(n))
    if name in ("lt", "leq", "gt", "geq", "eq", "neq"):
        return UINT, Const(1)
    if name == "shl":
        (k1, w1) = ops[0]
        (n,) = params
        if n < 0:
            raise WidthTypeError("shift amount must be nonnegative")
        return k1, Add(w1, Const(n))
    if name == "shr":
        (k1, w1) = ops[0]
        (n,) = params
        if n < 0:
            raise WidthTypeError("shift amount must be nonnegative")
        floor = 0 if k1 == UINT else 1
        return k1, Max(_shift(w1, n), Const(floor))
    if name == "dshl":
        (k1, w1), (k2, w2) = ops
        if k2 != UINT:
            raise WidthTypeError("dshl shift amount must be a UInt")
        return k1, Add(Add(w1, Exp2(w2)), Const(-1))
    if name == "dshr":
        (k1, w1), _ = ops
        return k1, w1
    if name == "cvt":
        (k1, w1) = ops[0]
        return SINT, (Add(w1, Const(1)) if k1 == UINT else w1)
    if name == "neg":
        (_k1, w1) = ops[0]
        return SINT, Add(w1, Const(1))
    if name == "not":
        (_k1, w1) = ops[0]
        return UINT, w1
    if name in ("and", "or", "xor"):
        (_k1, w1), (_k2, w2) = ops
        return UINT, Max(w1, w2)
    if name in ("andr", "orr", "xorr"):
        return UINT, Const(1)
    if name == "bits":
        hi, lo = params
        if not 0 <= lo <= hi:
            raise WidthTypeError(f"bits needs 0 <= lo <= hi, got hi={hi} lo={lo}")
        return UINT, Const(hi - lo + 1)
    if name == "head":
        (n,) = params
        if n < 0:
            raise WidthTypeError("head amount must be nonnegative")
        return UINT, Const(n)
    if name == "tail":
        (_k1, w1) = ops[0]
        (n,) = params
        if n < 0:
            raise WidthTypeError("tail amount must be nonnegative")
        return UINT, _shift(w1, n)
    raise UnsupportedOp(name)
