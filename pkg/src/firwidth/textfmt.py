"""Line-oriented text format for standalone constraint systems.

    # comment
    x >= min(2*y - 4, 7)
    y >= x + 1

One inequality per line: ``IDENT >= expr`` where expr is either a sum or
``min(sum, ...)``; sums combine integer constants, bare identifiers and
``INT*IDENT`` products.  Variables are declared implicitly on first use and
range over the nonnegative integers.
"""

from __future__ import annotations

import re

from .constraints import AffineTerm, ConstraintSystem


class FormatError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_TOKEN = re.compile(r"\s*(>=|min\b|[A-Za-z_][A-Za-z_0-9.\[\]$]*|-?\d+|[(),*+-])")


def _tokenize(line: str, line_no: int) -> list[str]:
    out, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise FormatError(line_no, f"unexpected character {line[pos]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _LineParser:
    def __init__(self, tokens: list[str], line_no: int, var_of):
        self.toks = tokens
        self.pos = 0
        self.line_no = line_no
        self.var_of = var_of

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormatError(self.line_no, f"expected {expected or 'more input'}, got {tok!r}")
        self.pos += 1
        return tok

    def sum_term(self) -> AffineTerm:
        total = self.atom(negatable=True)
        while self.peek() in ("+", "-"):
            op = self.take()
            if op == "+":
                total = total + self.atom(negatable=True)
            else:
                nxt = self.take()
                if not re.fullmatch(r"-?\d+", nxt):
                    raise FormatError(self.line_no, "only constants may be subtracted")
                total = total + AffineTerm.make(-int(nxt))
        return total

    def atom(self, negatable: bool = False) -> AffineTerm:
        tok = self.take()
        if re.fullmatch(r"-?\d+", tok):
            value = int(tok)
            if value < 0 and not negatable:
                raise FormatError(self.line_no, f"unexpected negative constant {value}")
            if self.peek() == "*":
                self.take("*")
                name = self.take()
                if value <= 0:
                    raise FormatError(self.line_no, f"coefficient must be positive, got {value}")
                return AffineTerm.make(0, {self.var_of(name): value})
            return AffineTerm.make(value)
        if re.fullmatch(r"[A-Za-z_].*", tok) and tok != "min":
            return AffineTerm.make(0, {self.var_of(tok): 1})
        raise FormatError(self.line_no, f"expected a constant or identifier, got {tok!r}")


def parse_text(text: str) -> ConstraintSystem:
    sys = ConstraintSystem()
    index: dict[str, int] = {}

    def var_of(name: str) -> int:
        if name not in index:
            index[name] = sys.new_var(name)
        return index[name]

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        p = _LineParser(_tokenize(line, line_no), line_no, var_of)
        lhs_name = p.take()
        if not re.fullmatch(r"[A-Za-z_].*", lhs_name):
            raise FormatError(line_no, f"expected an identifier, got {lhs_name!r}")
        lhs = var_of(lhs_name)
        p.take(">=")
        alternatives = []
        if p.peek() == "min":
            p.take("min")
            p.take("(")
            alternatives.append(p.sum_term())
            while p.peek() == ",":
                p.take(",")
                alternatives.append(p.sum_term())
            p.take(")")
        else:
            alternatives.append(p.sum_term())
        if p.peek() is not None:
            raise FormatError(line_no, f"trailing input {p.peek()!r}")
        sys.add_terms(lhs, *alternatives)
    return sys


def render_text(sys: ConstraintSystem) -> str:
    return sys.render() + ("\n" if sys.by_var else "")
