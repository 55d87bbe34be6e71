"""Text form of rational maps and sphere points.

Grammar::

    map    := expr [ '/' expr ]
    expr   := [ '+' | '-' ] term { ( '+' | '-' ) term }
    term   := factor { '*' factor }
    factor := base [ '^' uint ]
    base   := 'z' | number [ 'i' ] | 'i' | '(' expr ')'

Numbers are decimals with an optional exponent. Expressions expand to
polynomials in ``z`` with complex coefficients.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .poly import Polynomial
from .ratmap import RationalMap
from .sphere import INFINITY, SpherePoint, format_point, point

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_UINT = re.compile(r"\d+")
MAX_POWER = 4096


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at offset {position}: {text!r}")
        self.position = position
        self.text = text


@dataclass(frozen=True)
class MapExpression:
    source: str
    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str, pos: int | None = None):
        raise ParseError(message, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        acc = self.term().scale(sign)
        while self.peek() in "+-" and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.accept("*"):
            acc = acc * self.factor()
        return acc

    def factor(self) -> Polynomial:
        base = self.base()
        if self.accept("^"):
            self.skip()
            m = _UINT.match(self.text, self.pos)
            if not m:
                self.fail("expected a nonnegative integer exponent")
            k = int(m.group())
            if k > MAX_POWER:
                self.fail(f"exponent {k} exceeds {MAX_POWER}")
            self.pos = m.end()
            return base**k
        return base

    def base(self) -> Polynomial:
        ch = self.peek()
        if ch == "z":
            self.pos += 1
            return Polynomial([0.0, 1.0])
        if ch == "i":
            self.pos += 1
            return Polynomial([1j])
        if ch == "(":
            start = self.pos
            self.pos += 1
            inner = self.expr()
            if not self.accept(")"):
                self.fail(f"unbalanced parenthesis opened at offset {start}")
            return inner
        m = _NUMBER.match(self.text, self.pos)
        if m:
            value = float(m.group())
            self.pos = m.end()
            if self.pos < len(self.text) and self.text[self.pos] == "i":
                self.pos += 1
                return Polynomial([complex(0.0, value)])
            return Polynomial([value])
        if not ch:
            self.fail("unexpected end of input")
        self.fail(f"unexpected {ch!r}")

    def finish(self):
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}")


def parse_expression(text: str) -> tuple[Polynomial, Polynomial]:
    """Numerator and denominator polynomials of ``text``."""
    p = _Parser(text)
    num = p.expr()
    den = Polynomial([1.0])
    if p.accept("/"):
        den = p.expr()
    p.finish()
    return num, den


def parse_map(text: str, **kw) -> RationalMap:
    num, den = parse_expression(text)
    kw.setdefault("label", text.strip())
    return RationalMap(num, den, **kw)


def parse_point(text: str) -> SpherePoint:
    """``inf`` or a constant expression such as ``-1.5+2i``."""
    s = text.strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    num, den = parse_expression(s)
    if num.degree > 0 or den.degree > 0:
        raise ParseError("a point must not depend on z", text, 0)
    if den.is_zero:
        raise ParseError("division by zero", text, 0)
    if num.is_zero:
        return point(0)
    value = complex(num.coeffs[0]) / complex(den.coeffs[0])
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ParseError("non-finite point", text, 0)
    return point(value)


def _coeff_text(c: complex) -> str:
    return format_point(point(complex(c)))


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        c = complex(c)
        if c == 0:
            continue
        mono = "" if k == 0 else ("*z" if k == 1 else f"*z^{k}")
        parts.append(f"({_coeff_text(c)}){mono}")
    return " + ".join(parts)


def format_map(R: RationalMap) -> str:
    """Text that parses back to the same coefficients."""
    return f"({format_polynomial(R.p)}) / ({format_polynomial(R.q)})"
