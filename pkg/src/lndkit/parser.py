"""Recursive-descent parser for polynomial expressions.

Grammar (ASCII)::

    expr    := ['+' | '-'] product (('+' | '-') product)*
    product := factor ('*' factor)*
    factor  := ['-'] atom ('^' uint)?
    atom    := int ['/' int] | name | '(' expr ')'

``**`` is accepted as a synonym for ``^``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .poly import PolyRing, Polynomial


class ParseError(ValueError):
    """Malformed expression text."""

    def __init__(self, message: str, text: str = "", pos: int | None = None):
        if pos is not None:
            message = f"{message} at position {pos} in {text!r}"
        super().__init__(message)
        self.pos = pos


class UndeclaredVariableError(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r}", text, pos)
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("num", num, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", "", end))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value or kind != "op":
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", self.text, pos)

    def error(self, message: str):
        raise ParseError(message, self.text, self.peek()[2])

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", self.text, pos)
        return p

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.product()
        if sign < 0:
            acc = -acc
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.product()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def product(self) -> Polynomial:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Polynomial:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, v, pos = self.take()
            if kind == "op" and v == "-":
                raise ParseError("negative exponent", self.text, pos)
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer", self.text, pos)
            base = base ** int(v)
        return base

    def atom(self) -> Polynomial:
        kind, v, pos = self.take()
        if kind == "num":
            value = Fraction(int(v))
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                k2, d, p2 = self.take()
                if k2 != "num":
                    raise ParseError("only integer/integer rational literals are allowed", self.text, p2)
                if int(d) == 0:
                    raise ParseError("zero denominator", self.text, p2)
                value = Fraction(int(v), int(d))
            return self.ring.constant(value)
        if kind == "name":
            if v not in self.ring.variables:
                raise UndeclaredVariableError(
                    f"undeclared variable {v!r} (ring has {', '.join(self.ring.variables)})",
                    self.text,
                    pos,
                )
            return self.ring.var(v)
        if kind == "op" and v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {v or 'end of input'!r}", self.text, pos)


def parse(text: str, ring: PolyRing) -> Polynomial:
    """Parse ``text`` into a canonical polynomial of ``ring``."""
    return _Parser(text, ring).parse()
