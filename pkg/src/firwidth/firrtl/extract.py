"""Flatten aggregate types to ground leaves and extract width constraints.

Every connect (wherever it sits in a ``when`` tree: the latest connect wins
at runtime, but all of them bound the width) contributes per-leaf
inequalities; flipped bundle fields reverse which side is constrained.
Register resets constrain the register by its init value, and nodes are
bounded by their defining expression.  Sinks with explicitly declared widths
become post-solve checks instead of solver constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..constraints import (BoundCheck, Const, ConstraintSystem, Max, Var,
                           WidthExpr)
from . import widths
from .ast import (AsyncResetType, BundleType, Circuit, ClockType, Connect,
                  Expr, Inst, IsInvalid, Module, MuxExpr, Node, Port, Ref,
                  Reg, ResetType, SIntType, Skip, Stmt, Type, UIntType,
                  VectorType, When, Wire, is_ground)


class ExtractionError(Exception):
    pass


class TypeMismatch(ExtractionError):
    pass


class UnboundReference(ExtractionError):
    pass


@dataclass
class Leaf:
    name: str                # qualified path, e.g. "Top.io.out[2].data"
    kind: str                # widths.UINT / SINT / CLOCK / RESET / ASYNC_RESET
    width: int | None        # declared width, when known
    var: int | None          # system variable, when the width is unknown
    flip: bool               # orientation relative to the component root

    def width_expr(self) -> WidthExpr | None:
        if self.var is not None:
            return Var(self.var)
        if self.width is not None:
            return Const(self.width)
        return None


@dataclass
class GroundNode:
    leaf: Leaf


@dataclass
class VectorNode:
    elems: list


@dataclass
class BundleNode:
    fields: list[tuple[str, object]]

    def field(self, name: str):
        for fname, node in self.fields:
            if fname == name:
                return node
        return None


def _kind_of(t: Type) -> str:
    if isinstance(t, UIntType):
        return widths.UINT
    if isinstance(t, SIntType):
        return widths.SINT
    if isinstance(t, ClockType):
        return widths.CLOCK
    if isinstance(t, ResetType):
        return widths.RESET
    if isinstance(t, AsyncResetType):
        return widths.ASYNC_RESET
    raise TypeError(f"not a ground type: {t!r}")


def iter_leaves(node) -> Iterable[Leaf]:
    if isinstance(node, GroundNode):
        yield node.leaf
    elif isinstance(node, VectorNode):
        for elem in node.elems:
            yield from iter_leaves(elem)
    else:
        for _name, sub in node.fields:
            yield from iter_leaves(sub)


@dataclass
class ModuleScope:
    module: Module
    components: dict[str, object] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)

    def declare(self, name: str, tree, line: int = 0) -> None:
        if name in self.components:
            raise ExtractionError(f"line {line}: {name!r} is declared twice")
        self.components[name] = tree
        self.order.append(name)


@dataclass
class LeafTable:
    """Flattened view of a circuit: per-module component trees plus the
    shared constraint variable table."""

    system: ConstraintSystem
    checks: list[BoundCheck]
    scopes: dict[str, ModuleScope]
    leaves: list[Leaf]

    def leaves_of(self, module: str, component: str) -> list[Leaf]:
        return list(iter_leaves(self.scopes[module].components[component]))


class _Extractor:
    def __init__(self, circuit: Circuit):
        self.circuit = circuit
        self.system = ConstraintSystem()
        self.checks: list[BoundCheck] = []
        self.leaves: list[Leaf] = []
        self.scopes: dict[str, ModuleScope] = {}

    # -- leaf construction --------------------------------------------------

    def flatten(self, path: str, t: Type, flip: bool = False):
        if isinstance(t, VectorType):
            return VectorNode([self.flatten(f"{path}[{i}]", t.elem, flip)
                               for i in range(t.size)])
        if isinstance(t, BundleType):
            return BundleNode([(f.name, self.flatten(f"{path}.{f.name}", f.type,
                                                     flip ^ f.flip))
                               for f in t.fields])
        kind = _kind_of(t)
        width = getattr(t, "width", None)
        var = None
        if kind in (widths.UINT, widths.SINT) and width is None:
            var = self.system.new_var(path)
        leaf = Leaf(path, kind, width, var, flip)
        self.leaves.append(leaf)
        return GroundNode(leaf)

    # -- reference resolution -----------------------------------------------

    def resolve(self, scope: ModuleScope, ref: Ref, line: int):
        node = scope.components.get(ref.root)
        if node is None:
            raise UnboundReference(f"line {line}: {ref.root!r} is not declared")
        for piece in ref.path[1:]:
            if isinstance(piece, int):
                if not isinstance(node, VectorNode) or not 0 <= piece < len(node.elems):
                    raise TypeMismatch(f"line {line}: bad vector access in {ref}")
                node = node.elems[piece]
            else:
                if not isinstance(node, BundleNode):
                    raise TypeMismatch(f"line {line}: bad field access in {ref}")
                node = node.field(piece)
                if node is None:
                    raise TypeMismatch(f"line {line}: no field {piece!r} in {ref}")
        return node

    def _resolver(self, scope: ModuleScope, line: int) -> widths.Resolver:
        def resolve(ref: Ref) -> tuple[str, WidthExpr | None]:
            node = self.resolve(scope, ref, line)
            if not isinstance(node, GroundNode):
                raise TypeMismatch(f"line {line}: {ref} is not of ground type")
            return node.leaf.kind, node.leaf.width_expr()
        return resolve

    # -- constraint emission ------------------------------------------------

    def constrain(self, leaf: Leaf, rhs: WidthExpr | None, kind: str, line: int) -> None:
        if leaf.kind in widths.WIDTH_FREE or kind in widths.WIDTH_FREE:
            pair = {leaf.kind, kind}
            compatible = (leaf.kind == kind
                          or pair <= {widths.RESET, widths.ASYNC_RESET}
                          or pair == {widths.RESET, widths.UINT})
            if not compatible:
                raise TypeMismatch(
                    f"line {line}: cannot connect {kind} to {leaf.kind} {leaf.name}")
            return
        if kind != leaf.kind:
            raise TypeMismatch(
                f"line {line}: cannot connect {kind} to {leaf.kind} {leaf.name}")
        assert rhs is not None
        if leaf.var is not None:
            self.system.add(leaf.var, rhs)
        else:
            assert leaf.width is not None
            self.checks.append(BoundCheck(leaf.width, rhs,
                                          f"line {line}: {leaf.name} is fixed at {leaf.width} bits"))

    def pair(self, sink, source, line: int) -> None:
        """Connect a sink subtree to a source descriptor leaf-by-leaf.

        ``source`` is a flattened tree (for references), a MuxSource pairing
        two descriptors, or a ground expression.  A flipped leaf reverses the
        constrained side, which requires the source to be a reference.
        """
        if isinstance(sink, GroundNode):
            leaf = sink.leaf
            kind, rhs = self._source_width(source, line)
            if not leaf.flip:
                self.constrain(leaf, rhs, kind, line)
                return
            if not isinstance(source, GroundNode):
                raise TypeMismatch(
                    f"line {line}: flipped field {leaf.name} needs a reference source")
            self.constrain(source.leaf, leaf.width_expr(), leaf.kind, line)
            return
        if isinstance(sink, VectorNode):
            elems = self._source_elems(source, len(sink.elems), line)
            for s, e in zip(sink.elems, elems):
                self.pair(s, e, line)
            return
        if isinstance(sink, BundleNode):
            for name, sub in sink.fields:
                self.pair(sub, self._source_field(source, name, line), line)
            return
        raise TypeMismatch(f"line {line}: aggregate shapes do not match")

    def _source_width(self, source, line: int) -> tuple[str, WidthExpr | None]:
        if isinstance(source, GroundNode):
            return source.leaf.kind, source.leaf.width_expr()
        if isinstance(source, GroundExpr):
            return source.kind, source.width
        if isinstance(source, MuxSource):
            k1, w1 = self._source_width(source.high, line)
            k2, w2 = self._source_width(source.low, line)
            if k1 != k2:
                raise TypeMismatch(f"line {line}: mux branches have kinds {k1}/{k2}")
            if w1 is None or w2 is None:
                return k1, None
            return k1, Max(w1, w2)
        raise TypeMismatch(f"line {line}: expected a ground source")

    def _source_elems(self, source, size: int, line: int) -> list:
        if isinstance(source, VectorNode):
            if len(source.elems) != size:
                raise TypeMismatch(f"line {line}: vector sizes differ")
            return source.elems
        if isinstance(source, MuxSource):
            highs = self._source_elems(source.high, size, line)
            lows = self._source_elems(source.low, size, line)
            return [MuxSource(h, l) for h, l in zip(highs, lows)]
        raise TypeMismatch(f"line {line}: expected a vector source")

    def _source_field(self, source, name: str, line: int):
        if isinstance(source, BundleNode):
            node = source.field(name)
            if node is None:
                raise TypeMismatch(f"line {line}: source bundle has no field {name!r}")
            return node
        if isinstance(source, MuxSource):
            return MuxSource(self._source_field(source.high, name, line),
                             self._source_field(source.low, name, line))
        raise TypeMismatch(f"line {line}: expected a bundle source")

    def source_descriptor(self, scope: ModuleScope, expr: Expr, line: int):
        """Tree for references, MuxSource for muxes, GroundExpr otherwise."""
        if isinstance(expr, Ref):
            return self.resolve(scope, expr, line)
        if isinstance(expr, MuxExpr):
            high = self.source_descriptor(scope, expr.high, line)
            low = self.source_descriptor(scope, expr.low, line)
            if isinstance(high, (VectorNode, BundleNode, MuxSource)) or \
               isinstance(low, (VectorNode, BundleNode, MuxSource)):
                return MuxSource(high, low)
            # ground mux: fall through to plain width computation
        kind, w = widths.typed_width(expr, self._resolver(scope, line))
        return GroundExpr(kind, w)

    # -- statement walk -----------------------------------------------------

    def declare_components(self, scope: ModuleScope, stmts: Sequence[Stmt]) -> None:
        mod = scope.module.name
        for stmt in stmts:
            if isinstance(stmt, Wire):
                scope.declare(stmt.name, self.flatten(f"{mod}.{stmt.name}", stmt.type),
                              stmt.line)
            elif isinstance(stmt, Reg):
                scope.declare(stmt.name, self.flatten(f"{mod}.{stmt.name}", stmt.type),
                              stmt.line)
            elif isinstance(stmt, Inst):
                target = self.scopes.get(stmt.module)
                if target is None:
                    raise UnboundReference(
                        f"line {stmt.line}: module {stmt.module!r} is not defined")
                ports = BundleNode([(p.name, target.components[p.name])
                                    for p in target.module.ports])
                scope.declare(stmt.name, ports, stmt.line)
            elif isinstance(stmt, When):
                self.declare_components(scope, stmt.then)
                self.declare_components(scope, stmt.other)

    def declare_node(self, scope: ModuleScope, stmt: Node) -> None:
        mod = scope.module.name
        source = self.source_descriptor(scope, stmt.expr, stmt.line)
        tree = self.node_tree(f"{mod}.{stmt.name}", source, stmt.line)
        scope.declare(stmt.name, tree, stmt.line)

    def node_tree(self, path: str, source, line: int):
        """Fresh leaves shaped like the source; nodes are passive, so flips
        are dropped.  A leaf with a constant source width is itself known,
        otherwise it gets a variable bounded by the source width."""
        shape = source
        while isinstance(shape, MuxSource):
            shape = shape.high
        if isinstance(shape, VectorNode):
            elems = self._source_elems(source, len(shape.elems), line)
            return VectorNode([self.node_tree(f"{path}[{i}]", e, line)
                               for i, e in enumerate(elems)])
        if isinstance(shape, BundleNode):
            return BundleNode([(n, self.node_tree(f"{path}.{n}",
                                                  self._source_field(source, n, line), line))
                               for n, _ in shape.fields])
        kind, rhs = self._source_width(source, line)
        return self._node_leaf(path, kind, rhs, line)

    def _node_leaf(self, path: str, kind: str, rhs: WidthExpr | None, line: int):
        if kind in widths.WIDTH_FREE or rhs is None:
            leaf = Leaf(path, kind, None, None, False)
        elif isinstance(rhs, Const):
            leaf = Leaf(path, kind, rhs.value, None, False)
        else:
            var = self.system.new_var(path)
            leaf = Leaf(path, kind, None, var, False)
            self.system.add(var, rhs)
        self.leaves.append(leaf)
        return GroundNode(leaf)

    def extract_stmts(self, scope: ModuleScope, stmts: Sequence[Stmt]) -> None:
        for stmt in stmts:
            if isinstance(stmt, Connect):
                sink = self.resolve(scope, stmt.sink, stmt.line)
                source = self.source_descriptor(scope, stmt.expr, stmt.line)
                self.pair(sink, source, stmt.line)
            elif isinstance(stmt, Reg) and stmt.reset is not None:
                sink = scope.components[stmt.name]
                source = self.source_descriptor(scope, stmt.reset[1], stmt.line)
                self.pair(sink, source, stmt.line)
            elif isinstance(stmt, Node):
                self.declare_node(scope, stmt)
            elif isinstance(stmt, When):
                self.extract_stmts(scope, stmt.then)
                self.extract_stmts(scope, stmt.other)
            elif isinstance(stmt, (Wire, Reg, Inst, IsInvalid, Skip)):
                continue

    def run(self) -> LeafTable:
        for module in self.circuit.modules:
            if module.name in self.scopes:
                raise ExtractionError(f"module {module.name!r} is defined twice")
            scope = ModuleScope(module)
            self.scopes[module.name] = scope
            for port in module.ports:
                scope.declare(port.name,
                              self.flatten(f"{module.name}.{port.name}", port.type),
                              port.line)
        for module in self.circuit.modules:
            scope = self.scopes[module.name]
            self.declare_components(scope, module.stmts)
        for module in self.circuit.modules:
            scope = self.scopes[module.name]
            self.extract_stmts(scope, module.stmts)
        return LeafTable(self.system, self.checks, self.scopes, self.leaves)


@dataclass
class MuxSource:
    high: object
    low: object


@dataclass
class GroundExpr:
    kind: str
    width: WidthExpr | None


def extract(circuit: Circuit) -> LeafTable:
    """Flatten the circuit and collect its width-constraint system plus the
    fixed-width sink checks."""
    return _Extractor(circuit).run()
