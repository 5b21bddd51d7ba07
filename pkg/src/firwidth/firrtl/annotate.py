"""Re-emit a circuit with every inferred width made explicit.

The printer produces canonical two-space-indented text; declared types are
rebuilt from the flattened leaves so each formerly-unknown width carries its
inferred value.  Re-parsing the output therefore yields a circuit whose
extracted constraint system is empty.
"""

from __future__ import annotations

from typing import Sequence

from .ast import (AsyncResetType, BundleField, BundleType, Circuit, ClockType,
                  Connect, Expr, Inst, IsInvalid, Module, MuxExpr, Node, Port,
                  PrimOp, Ref, Reg, ResetType, SIntLit, SIntType, Skip, Stmt,
                  Type, UIntLit, UIntType, VectorType, When, Wire)
from .extract import BundleNode, GroundNode, LeafTable, VectorNode


def concrete_type(declared: Type, tree, values: Sequence[int]) -> Type:
    """Declared type with unknown widths replaced by solved values."""
    if isinstance(declared, VectorType):
        sub = tree.elems[0] if isinstance(tree, VectorNode) and tree.elems else None
        return VectorType(concrete_type(declared.elem, sub, values), declared.size)
    if isinstance(declared, BundleType):
        fields = tuple(
            BundleField(f.name, f.flip,
                        concrete_type(f.type,
                                      tree.field(f.name) if isinstance(tree, BundleNode) else None,
                                      values))
            for f in declared.fields)
        return BundleType(fields)
    if isinstance(declared, (UIntType, SIntType)) and declared.width is None:
        # A zero-length vector leaves no leaf behind; 0 is the least width.
        width = 0
        if isinstance(tree, GroundNode) and tree.leaf.var is not None:
            width = values[tree.leaf.var]
        return UIntType(width) if isinstance(declared, UIntType) else SIntType(width)
    return declared


def render_type(t: Type) -> str:
    if isinstance(t, UIntType):
        return "UInt" if t.width is None else f"UInt<{t.width}>"
    if isinstance(t, SIntType):
        return "SInt" if t.width is None else f"SInt<{t.width}>"
    if isinstance(t, ClockType):
        return "Clock"
    if isinstance(t, ResetType):
        return "Reset"
    if isinstance(t, AsyncResetType):
        return "AsyncReset"
    if isinstance(t, VectorType):
        return f"{render_type(t.elem)}[{t.size}]"
    if isinstance(t, BundleType):
        parts = [("flip " if f.flip else "") + f"{f.name} : {render_type(f.type)}"
                 for f in t.fields]
        return "{ " + ", ".join(parts) + " }"
    raise TypeError(f"not a type: {t!r}")


def render_expr(e: Expr) -> str:
    if isinstance(e, (UIntLit, SIntLit)):
        base = "UInt" if isinstance(e, UIntLit) else "SInt"
        width = "" if e.width is None else f"<{e.width}>"
        value = e.raw if e.raw is not None else str(e.value)
        return f"{base}{width}({value})"
    if isinstance(e, Ref):
        return str(e)
    if isinstance(e, MuxExpr):
        return f"mux({render_expr(e.cond)}, {render_expr(e.high)}, {render_expr(e.low)})"
    if isinstance(e, PrimOp):
        args = [render_expr(a) for a in e.args] + [str(p) for p in e.params]
        return f"{e.name}({', '.join(args)})"
    raise TypeError(f"not an expression: {e!r}")


class _Printer:
    def __init__(self, table: LeafTable, values: Sequence[int]):
        self.table = table
        self.values = values
        self.lines: list[str] = []

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def type_of(self, module: str, component: str, declared: Type) -> str:
        tree = self.table.scopes[module].components[component]
        return render_type(concrete_type(declared, tree, self.values))

    def stmt(self, module: str, s: Stmt, depth: int) -> None:
        if isinstance(s, Wire):
            self.emit(depth, f"wire {s.name} : {self.type_of(module, s.name, s.type)}")
        elif isinstance(s, Reg):
            line = f"reg {s.name} : {self.type_of(module, s.name, s.type)}, {render_expr(s.clock)}"
            if s.reset is not None:
                rst, init = s.reset
                line += f" with : (reset => ({render_expr(rst)}, {render_expr(init)}))"
            self.emit(depth, line)
        elif isinstance(s, Inst):
            self.emit(depth, f"inst {s.name} of {s.module}")
        elif isinstance(s, Node):
            self.emit(depth, f"node {s.name} = {render_expr(s.expr)}")
        elif isinstance(s, Connect):
            self.emit(depth, f"{s.sink} <= {render_expr(s.expr)}")
        elif isinstance(s, IsInvalid):
            self.emit(depth, f"{s.ref} is invalid")
        elif isinstance(s, When):
            self.emit(depth, f"when {render_expr(s.cond)} :")
            for sub in s.then:
                self.stmt(module, sub, depth + 1)
            if s.other:
                self.emit(depth, "else :")
                for sub in s.other:
                    self.stmt(module, sub, depth + 1)
        elif isinstance(s, Skip):
            self.emit(depth, "skip")
        else:
            raise TypeError(f"not a statement: {s!r}")

    def render(self, circuit: Circuit) -> str:
        self.emit(0, f"circuit {circuit.name} :")
        for m in circuit.modules:
            self.emit(1, f"module {m.name} :")
            for p in m.ports:
                self.emit(2, f"{p.direction} {p.name} : {self.type_of(m.name, p.name, p.type)}")
            for s in m.stmts:
                self.stmt(m.name, s, 2)
        return "\n".join(self.lines) + "\n"


def apply_solution(circuit: Circuit, table: LeafTable, values: Sequence[int]) -> str:
    """Annotated source text with all inferred widths explicit."""
    return _Printer(table, values).render(circuit)


def width_report(table: LeafTable, values: Sequence[int]) -> dict[str, int]:
    """Leaf name -> width for every leaf that carries a width, in declaration
    order (stable for diffing)."""
    report: dict[str, int] = {}
    for leaf in table.leaves:
        if leaf.var is not None:
            report[leaf.name] = values[leaf.var]
        elif leaf.width is not None:
            report[leaf.name] = leaf.width
    return report
