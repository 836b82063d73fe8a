"""Small expression language for index sets.

Grammar (binary operators share one precedence level, left-associative)::

    expr     := primary ( '+' primary | 'vee' primary | 'shift' number )*
    primary  := literal | 'N0' | 'empty' | func '(' expr ')' | '(' expr ')'
    literal  := '{' [ point ( ',' point )* ] '}'
    point    := '(' number ',' number ',' integer ')'      -- (Re z, Im z, k)
    func     := 'hat' | 'flat' | 'sharp'

``hat(E)`` is the generated family of E; ``flat(X)`` and ``sharp(X)`` treat
their argument as an already generated family, so the usual chain reads
``sharp(hat(E))``.  Numbers may be decimals or fractions such as ``3/2``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ExpressionSyntaxError
from .indexset import (
    DEFAULT_TOL,
    INF,
    TruncatedIndexSet,
    empty,
    extended_union,
    generate_flat,
    generate_hat,
    generate_sharp,
    natural_numbers,
    shift,
    shift_int,
    sum_,
)

_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:\.\d*)?(?:[eE][-+]?\d+)?(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<sym>[{}(),+]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r} at position {pos}")
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, cutoff, tol: float, exact: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.C = cutoff
        self.tol = 0.0 if exact else tol
        self.exact = exact

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        tok = self.toks[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise ExpressionSyntaxError(f"expected {want!r} at position {tok[2]}, found {got!r}")
        self.i += 1
        return tok

    def number(self):
        tok = self.take(kind="num")
        try:
            v = Fraction(tok[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ExpressionSyntaxError(f"bad number {tok[1]!r} at position {tok[2]}") from exc
        return v if self.exact else float(v)

    def parse(self) -> TruncatedIndexSet:
        E = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            raise ExpressionSyntaxError(f"unexpected {tok[1]!r} at position {tok[2]}")
        return E.truncate(self.C)

    def expr(self) -> TruncatedIndexSet:
        E = self.primary()
        while True:
            kind, val, _ = self.peek()
            if val == "+":
                self.take()
                E = sum_(E, self.primary())
            elif kind == "name" and val == "vee":
                self.take()
                E = extended_union(E, self.primary())
            elif kind == "name" and val == "shift":
                self.take()
                j = self.number()
                E = shift_int(E, int(j)) if j == int(j) and j >= 0 else shift(E, j)
            else:
                return E

    def primary(self) -> TruncatedIndexSet:
        kind, val, pos = self.peek()
        if val == "(":
            self.take()
            E = self.expr()
            self.take(")")
            return E
        if val == "{":
            return self.literal()
        if kind == "name":
            self.take()
            if val == "N0":
                return natural_numbers(self.tol)
            if val == "empty":
                return empty(self.tol)
            if val in ("hat", "flat", "sharp"):
                if self.C == INF:
                    raise ExpressionSyntaxError(f"{val}() needs a finite cutoff")
                self.take("(")
                X = self.expr()
                self.take(")")
                if val == "hat":
                    return generate_hat(X, self.C)
                if val == "flat":
                    return generate_flat(X, self.C)
                return generate_sharp(generate_flat(X, self.C), X, self.C)
            raise ExpressionSyntaxError(f"unknown name {val!r} at position {pos}")
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r} at position {pos}")

    def literal(self) -> TruncatedIndexSet:
        self.take("{")
        pts = []
        if self.peek()[1] != "}":
            while True:
                self.take("(")
                re_ = self.number()
                self.take(",")
                im = self.number()
                self.take(",")
                k = self.number()
                if k != int(k) or k < 0:
                    raise ExpressionSyntaxError(f"log power must be a nonnegative integer, got {k}")
                self.take(")")
                pts.append((re_, im, int(k)))
                if self.peek()[1] != ",":
                    break
                self.take(",")
        self.take("}")
        return TruncatedIndexSet.from_points(pts, INF, self.tol)


def evaluate(text: str, cutoff=INF, tol: float = DEFAULT_TOL, exact: bool = False) -> TruncatedIndexSet:
    """Evaluate an index-set expression; the result is valid below ``cutoff``."""
    return _Parser(text, cutoff, tol, exact).parse()
