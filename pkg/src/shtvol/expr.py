"""Parser for polynomial expressions over x1..xk with rational literals.

Grammar (EBNF, whitespace ignored)::

    expr   = term , { ("+" | "-") , term } ;
    term   = factor , { ("*" | "/") , factor } ;
    factor = ("+" | "-") , factor | power ;
    power  = atom , [ "^" , factor ] ;
    atom   = number | "x" , digits | "(" , expr , ")" ;
    number = digits , [ "/" , digits ] | digits , "." , digits ;

Exponents must evaluate to non-negative integer constants and division is
only allowed by nonzero rational constants.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import SchemaError
from .poly import Poly

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+)|(x\d+)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SchemaError(f"unexpected character at {pos} in {text!r}")
        num, var, op = m.groups()
        if num is not None:
            out.append(("num", Fraction(num)))
        elif var is not None:
            out.append(("var", int(var[1:])))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens, nvars):
        self.toks = tokens
        self.i = 0
        self.n = nvars

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise SchemaError(f"expected {op!r}")
        self.i += 1
        return tok

    def expr(self):
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.factor()
            if op == "*":
                val = val * rhs
            else:
                c = _as_const(rhs)
                if c == 0:
                    raise SchemaError("division by zero")
                val = val.scale(Fraction(1) / c)
        return val

    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.factor()
        if self.peek() == ("op", "+"):
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = _as_const(self.factor())
            if e.denominator != 1 or e < 0:
                raise SchemaError("exponent must be a non-negative integer")
            return base ** int(e)
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Poly.const(val, self.n)
        if kind == "var":
            self.take()
            if not 1 <= val <= self.n:
                raise SchemaError(f"variable x{val} outside x1..x{self.n}")
            return Poly.var(val - 1, self.n)
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take(")")
            return v
        raise SchemaError("unexpected end of expression" if kind is None else f"unexpected token {val!r}")


def _as_const(p: Poly) -> Fraction:
    if p.degree() > 0:
        raise SchemaError("expected a constant")
    return Fraction(p.constant_term())


def parse_poly(text: str, nvars: int) -> Poly:
    """Parse ``text`` into a Poly in ``nvars`` variables."""
    if not isinstance(text, str) or not text.strip():
        raise SchemaError("empty expression")
    p = _Parser(_tokenize(text), nvars)
    val = p.expr()
    if p.i != len(p.toks):
        raise SchemaError(f"trailing input in {text!r}")
    return val
