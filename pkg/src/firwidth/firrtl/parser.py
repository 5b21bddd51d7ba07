"""Indentation-sensitive lexer and recursive-descent parser for FIRRTL.

Block structure (circuit, module, when/else bodies) is carried by synthetic
INDENT/DEDENT tokens, Python style: a deeper line pushes a level, shallower
lines must return to a previously seen level.  Tabs in leading whitespace are
rejected; ``;`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (AsyncResetType, BundleField, BundleType, Circuit, ClockType,
                  Connect, Expr, Inst, IsInvalid, Module, MuxExpr, Node, Port,
                  PrimOp, Ref, Reg, ResetType, SIntLit, SIntType, Skip, Stmt,
                  Type, UIntLit, UIntType, VectorType, When, Wire)


class FirrtlSyntaxError(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class UnsupportedConstruct(Exception):
    def __init__(self, line: int, what: str):
        super().__init__(f"line {line}: {what} is not supported")
        self.line = line


_UNSUPPORTED = {"mem", "smem", "cmem", "mport", "attach", "define", "probe",
                "rwprobe", "printf", "stop", "assert", "assume", "cover",
                "force", "release", "Analog", "Probe", "RWProbe"}

_OPS_2E = {"add", "sub", "mul", "div", "mod", "rem", "lt", "leq", "gt", "geq",
           "eq", "neq", "dshl", "dshr", "and", "or", "xor", "cat"}
_OPS_1E = {"asUInt", "asSInt", "asClock", "cvt", "neg", "not", "andr", "orr", "xorr"}
_OPS_1E1I = {"pad", "shl", "shr", "head", "tail"}
_OPS_1E2I = {"bits"}
PRIMOPS = _OPS_2E | _OPS_1E | _OPS_1E1I | _OPS_1E2I


@dataclass(frozen=True)
class Token:
    kind: str          # IDENT INT STRING PUNCT NEWLINE INDENT DEDENT EOF
    text: str
    line: int
    col: int


_PUNCT = ("<=", "=>", "<", ">", ":", ",", ".", "(", ")", "{", "}", "[", "]", "=")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9$]*")
_INT_RE = re.compile(r"-?\d+")
_STRING_RE = re.compile(r'"([^"\\]*)"')


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    levels = [0]
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split(";", 1)[0].rstrip()
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip(" \t"))
        if "\t" in body[:indent]:
            raise FirrtlSyntaxError(line_no, 1, "tabs are not allowed in indentation")
        if indent > levels[-1]:
            levels.append(indent)
            tokens.append(Token("INDENT", "", line_no, 1))
        else:
            while indent < levels[-1]:
                levels.pop()
                tokens.append(Token("DEDENT", "", line_no, 1))
            if indent != levels[-1]:
                raise FirrtlSyntaxError(line_no, 1, "indentation does not match any open block")
        pos = indent
        while pos < len(body):
            ch = body[pos]
            if ch == " ":
                pos += 1
                continue
            if ch == "\t":
                raise FirrtlSyntaxError(line_no, pos + 1, "tabs are not allowed")
            m = _STRING_RE.match(body, pos)
            if m:
                tokens.append(Token("STRING", m.group(1), line_no, pos + 1))
                pos = m.end()
                continue
            m = _IDENT_RE.match(body, pos)
            if m:
                tokens.append(Token("IDENT", m.group(0), line_no, pos + 1))
                pos = m.end()
                continue
            m = _INT_RE.match(body, pos)
            if m:
                tokens.append(Token("INT", m.group(0), line_no, pos + 1))
                pos = m.end()
                continue
            for p in _PUNCT:
                if body.startswith(p, pos):
                    tokens.append(Token("PUNCT", p, line_no, pos + 1))
                    pos += len(p)
                    break
            else:
                raise FirrtlSyntaxError(line_no, pos + 1, f"unexpected character {ch!r}")
        tokens.append(Token("NEWLINE", "", line_no, len(body) + 1))
    last = tokens[-1].line if tokens else 1
    while len(levels) > 1:
        levels.pop()
        tokens.append(Token("DEDENT", "", last, 1))
    tokens.append(Token("EOF", "", last, 1))
    return tokens


def _decode_int(token: Token, string: bool) -> int:
    text = token.text
    if not string:
        return int(text)
    m = re.fullmatch(r"([bohd]?)(-?)([0-9a-fA-F]+)", text)
    if not m:
        raise FirrtlSyntaxError(token.line, token.col, f"bad literal {text!r}")
    base = {"b": 2, "o": 8, "h": 16, "d": 10, "": 10}[m.group(1)]
    try:
        value = int(m.group(3), base)
    except ValueError:
        raise FirrtlSyntaxError(token.line, token.col,
                                f"bad base-{base} literal {text!r}") from None
    return -value if m.group(2) else value


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token plumbing ---------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, message: str) -> FirrtlSyntaxError:
        tok = self.peek()
        shown = tok.text or tok.kind
        return FirrtlSyntaxError(tok.line, tok.col, f"{message} (found {shown!r})")

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise self.fail(f"expected {text or kind}")
        return self.next()

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> bool:
        if self.at(kind, text):
            self.next()
            return True
        return False

    def end_line(self) -> None:
        self.expect("NEWLINE")

    # -- grammar ------------------------------------------------------------

    def circuit(self) -> Circuit:
        self.expect("IDENT", "circuit")
        name = self.expect("IDENT").text
        self.expect("PUNCT", ":")
        self.end_line()
        modules = []
        if self.accept("INDENT"):
            while self.at("IDENT", "module"):
                modules.append(self.module())
            self.expect("DEDENT")
        if not self.at("EOF"):
            raise self.fail("expected end of input")
        return Circuit(name, tuple(modules))

    def module(self) -> Module:
        self.expect("IDENT", "module")
        name = self.expect("IDENT").text
        self.expect("PUNCT", ":")
        self.end_line()
        ports: list[Port] = []
        stmts: list[Stmt] = []
        if self.accept("INDENT"):
            while self.at("IDENT", "input") or self.at("IDENT", "output"):
                tok = self.next()
                pname = self.expect("IDENT").text
                self.expect("PUNCT", ":")
                ptype = self.type()
                self.end_line()
                ports.append(Port(tok.text, pname, ptype, line=tok.line))
            while not self.at("DEDENT"):
                stmts.append(self.stmt())
            self.expect("DEDENT")
        return Module(name, tuple(ports), tuple(stmts))

    def type(self) -> Type:
        t = self.base_type()
        while self.accept("PUNCT", "["):
            size = _decode_int(self.expect("INT"), string=False)
            self.expect("PUNCT", "]")
            t = VectorType(t, size)
        return t

    def base_type(self) -> Type:
        if self.accept("PUNCT", "{"):
            fields = [self.bundle_field()]
            while self.accept("PUNCT", ","):
                fields.append(self.bundle_field())
            self.expect("PUNCT", "}")
            return BundleType(tuple(fields))
        tok = self.expect("IDENT")
        if tok.text in ("UInt", "SInt"):
            width = None
            if self.accept("PUNCT", "<"):
                width = _decode_int(self.expect("INT"), string=False)
                if width < 0:
                    raise FirrtlSyntaxError(tok.line, tok.col, "widths must be nonnegative")
                self.expect("PUNCT", ">")
            return UIntType(width) if tok.text == "UInt" else SIntType(width)
        if tok.text == "Clock":
            return ClockType()
        if tok.text == "Reset":
            return ResetType()
        if tok.text == "AsyncReset":
            return AsyncResetType()
        if tok.text in _UNSUPPORTED:
            raise UnsupportedConstruct(tok.line, tok.text)
        raise FirrtlSyntaxError(tok.line, tok.col, f"unknown type {tok.text!r}")

    def bundle_field(self) -> BundleField:
        flip = self.accept("IDENT", "flip")
        name = self.expect("IDENT").text
        self.expect("PUNCT", ":")
        return BundleField(name, flip, self.type())

    def stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.fail("expected a statement")
        if tok.text in _UNSUPPORTED:
            raise UnsupportedConstruct(tok.line, tok.text)
        if tok.text == "wire" and self.peek(2).text == ":":
            self.next()
            name = self.expect("IDENT").text
            self.expect("PUNCT", ":")
            t = self.type()
            self.end_line()
            return Wire(name, t, line=tok.line)
        if tok.text == "reg" and self.peek(2).text == ":":
            return self.reg()
        if tok.text == "inst" and self.peek(2).text == "of":
            self.next()
            name = self.expect("IDENT").text
            self.expect("IDENT", "of")
            module = self.expect("IDENT").text
            self.end_line()
            return Inst(name, module, line=tok.line)
        if tok.text == "node" and self.peek(2).text == "=":
            self.next()
            name = self.expect("IDENT").text
            self.expect("PUNCT", "=")
            expr = self.expr()
            self.end_line()
            return Node(name, expr, line=tok.line)
        if tok.text == "when":
            return self.when()
        if tok.text == "skip":
            self.next()
            self.end_line()
            return Skip(line=tok.line)
        ref = self.ref()
        if self.accept("PUNCT", "<="):
            expr = self.expr()
            self.end_line()
            return Connect(ref, expr, line=tok.line)
        if self.accept("IDENT", "is"):
            self.expect("IDENT", "invalid")
            self.end_line()
            return IsInvalid(ref, line=tok.line)
        raise self.fail("expected '<=' or 'is invalid'")

    def reg(self) -> Stmt:
        # Accepts both 'reg x : T, clk with : (reset => (r, i))' and the
        # parenthesized '(with: {reset => (r, i)})' spelling.
        tok = self.expect("IDENT", "reg")
        name = self.expect("IDENT").text
        self.expect("PUNCT", ":")
        t = self.type()
        self.accept("PUNCT", ",")
        clock = self.expr()
        self.accept("PUNCT", ",")
        reset = None
        wrapped = self.at("PUNCT", "(") and self.peek(1).text == "with"
        if wrapped:
            self.next()
        if self.accept("IDENT", "with"):
            self.expect("PUNCT", ":")
            if self.accept("PUNCT", "{"):
                closer = "}"
            else:
                self.expect("PUNCT", "(")
                closer = ")"
            self.expect("IDENT", "reset")
            self.expect("PUNCT", "=>")
            self.expect("PUNCT", "(")
            rst = self.expr()
            self.expect("PUNCT", ",")
            init = self.expr()
            self.expect("PUNCT", ")")
            self.expect("PUNCT", closer)
            if wrapped:
                self.expect("PUNCT", ")")
            reset = (rst, init)
        self.end_line()
        return Reg(name, t, clock, reset, line=tok.line)

    def when(self) -> Stmt:
        tok = self.expect("IDENT", "when")
        cond = self.expr()
        self.expect("PUNCT", ":")
        then = self.block()
        other: tuple[Stmt, ...] = ()
        if self.at("IDENT", "else"):
            self.next()
            if self.at("IDENT", "when"):
                other = (self.when(),)
            else:
                self.expect("PUNCT", ":")
                other = self.block()
        return When(cond, then, other, line=tok.line)

    def block(self) -> tuple[Stmt, ...]:
        self.end_line()
        stmts = []
        if self.accept("INDENT"):
            while not self.at("DEDENT"):
                stmts.append(self.stmt())
            self.expect("DEDENT")
        return tuple(stmts)

    # -- expressions --------------------------------------------------------

    def expr(self) -> Expr:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.fail("expected an expression")
        if tok.text in ("UInt", "SInt") and self.peek(1).text in ("<", "("):
            return self.literal()
        if tok.text == "mux" and self.peek(1).text == "(":
            self.next()
            self.expect("PUNCT", "(")
            cond = self.expr()
            self.expect("PUNCT", ",")
            high = self.expr()
            self.expect("PUNCT", ",")
            low = self.expr()
            self.expect("PUNCT", ")")
            return MuxExpr(cond, high, low)
        if tok.text in PRIMOPS and self.peek(1).text == "(":
            return self.primop()
        if tok.text in _UNSUPPORTED:
            raise UnsupportedConstruct(tok.line, tok.text)
        return self.ref()

    def literal(self) -> Expr:
        tok = self.next()
        width = None
        if self.accept("PUNCT", "<"):
            width = _decode_int(self.expect("INT"), string=False)
            self.expect("PUNCT", ">")
        self.expect("PUNCT", "(")
        val_tok = self.peek()
        if self.at("STRING"):
            self.next()
            value = _decode_int(val_tok, string=True)
            raw = f'"{val_tok.text}"'
        else:
            val_tok = self.expect("INT")
            value = _decode_int(val_tok, string=False)
            raw = val_tok.text
        self.expect("PUNCT", ")")
        if tok.text == "UInt":
            if value < 0:
                raise FirrtlSyntaxError(tok.line, tok.col, "UInt literals must be nonnegative")
            return UIntLit(width, value, raw)
        return SIntLit(width, value, raw)

    def primop(self) -> Expr:
        tok = self.next()
        name = tok.text
        self.expect("PUNCT", "(")
        args: list[Expr] = [self.expr()]
        params: list[int] = []
        while self.accept("PUNCT", ","):
            if self.at("INT"):
                params.append(_decode_int(self.next(), string=False))
            else:
                args.append(self.expr())
        self.expect("PUNCT", ")")
        shape = {"2e": (2, 0), "1e": (1, 0), "1e1i": (1, 1), "1e2i": (1, 2)}
        kind = ("2e" if name in _OPS_2E else "1e" if name in _OPS_1E
                else "1e1i" if name in _OPS_1E1I else "1e2i")
        want_args, want_params = shape[kind]
        if (len(args), len(params)) != (want_args, want_params):
            raise FirrtlSyntaxError(tok.line, tok.col,
                                    f"{name} takes {want_args} expression(s) and {want_params} integer(s)")
        return PrimOp(name, tuple(args), tuple(params))

    def ref(self) -> Ref:
        tok = self.expect("IDENT")
        path: list[str | int] = [tok.text]
        while True:
            if self.accept("PUNCT", "."):
                path.append(self.expect("IDENT").text)
            elif self.at("PUNCT", "[") and self.peek(1).kind == "INT":
                self.next()
                path.append(_decode_int(self.expect("INT"), string=False))
                self.expect("PUNCT", "]")
            else:
                return Ref(tuple(path))


def parse(text: str) -> Circuit:
    """Parse FIRRTL source into a circuit AST.

    Raises FirrtlSyntaxError with line/column on malformed input and
    UnsupportedConstruct for memories, probes and other constructs outside
    the digital subset.
    """
    return Parser(tokenize(text)).circuit()
