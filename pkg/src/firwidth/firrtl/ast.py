"""AST for the digital FIRRTL subset (no memories, probes or analog types)."""

from __future__ import annotations

from dataclasses import dataclass, field


# --- types -----------------------------------------------------------------


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class UIntType(Type):
    width: int | None = None


@dataclass(frozen=True)
class SIntType(Type):
    width: int | None = None


@dataclass(frozen=True)
class ClockType(Type):
    pass


@dataclass(frozen=True)
class ResetType(Type):
    pass


@dataclass(frozen=True)
class AsyncResetType(Type):
    pass


@dataclass(frozen=True)
class VectorType(Type):
    elem: Type
    size: int


@dataclass(frozen=True)
class BundleField:
    name: str
    flip: bool
    type: Type


@dataclass(frozen=True)
class BundleType(Type):
    fields: tuple[BundleField, ...]


def is_ground(t: Type) -> bool:
    return not isinstance(t, (VectorType, BundleType))


# --- expressions -----------------------------------------------------------


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class UIntLit(Expr):
    width: int | None
    value: int
    raw: str | None = None   # original literal spelling, for faithful printing


@dataclass(frozen=True)
class SIntLit(Expr):
    width: int | None
    value: int
    raw: str | None = None


@dataclass(frozen=True)
class Ref(Expr):
    """Reference path: component name followed by field names (str) and
    vector indices (int)."""

    path: tuple[str | int, ...]

    @property
    def root(self) -> str:
        assert isinstance(self.path[0], str)
        return self.path[0]

    def __str__(self) -> str:
        out = str(self.path[0])
        for piece in self.path[1:]:
            out += f"[{piece}]" if isinstance(piece, int) else f".{piece}"
        return out


@dataclass(frozen=True)
class MuxExpr(Expr):
    cond: Expr
    high: Expr
    low: Expr


@dataclass(frozen=True)
class PrimOp(Expr):
    name: str
    args: tuple[Expr, ...]
    params: tuple[int, ...] = ()


# --- statements ------------------------------------------------------------


@dataclass(frozen=True)
class Stmt:
    line: int = field(default=0, kw_only=True)


@dataclass(frozen=True)
class Wire(Stmt):
    name: str
    type: Type


@dataclass(frozen=True)
class Reg(Stmt):
    name: str
    type: Type
    clock: Expr
    reset: tuple[Expr, Expr] | None = None   # (reset signal, init value)


@dataclass(frozen=True)
class Inst(Stmt):
    name: str
    module: str


@dataclass(frozen=True)
class Node(Stmt):
    name: str
    expr: Expr


@dataclass(frozen=True)
class Connect(Stmt):
    sink: Ref
    expr: Expr


@dataclass(frozen=True)
class IsInvalid(Stmt):
    ref: Ref


@dataclass(frozen=True)
class When(Stmt):
    cond: Expr
    then: tuple[Stmt, ...]
    other: tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Port:
    direction: str            # "input" | "output"
    name: str
    type: Type
    line: int = 0


@dataclass(frozen=True)
class Module:
    name: str
    ports: tuple[Port, ...]
    stmts: tuple[Stmt, ...]


@dataclass(frozen=True)
class Circuit:
    name: str
    modules: tuple[Module, ...]

    def module(self, name: str) -> Module:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)
