"""Tiny expression grammar for inline map and curve specs.

Accepts sums of signed monomial terms with explicit or juxtaposed
multiplication and integer powers, e.g. ``(u, v^3+u^3 v)`` for a plane
map or ``t,t^3`` for a curve.  Plane maps use variables u, v; curves
use t.  The output is exact Poly1/Poly2 values ready for germ
construction.
"""

from __future__ import annotations

import re

from .poly import Poly1, Poly2

__all__ = ["ParseError", "parse_map", "parse_curve", "parse_reals"]


class ParseError(ValueError):
    """The expression does not conform to the inline grammar."""


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z]+)"
    r"|(?P<op>\*\*|[\^*+\-(),])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos}")
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name")))
        else:
            op = m.group("op")
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive descent over the token list for one expression."""

    def __init__(self, tokens, variables, one):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.one = one

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse_expr(self):
        sign = 1.0
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1.0 if val == "-" else 1.0
        acc = self.parse_term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                term = self.parse_term()
                acc = acc + (term * (-1.0 if val == "-" else 1.0))
            else:
                return acc

    def parse_term(self):
        acc = self.parse_factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.parse_factor()
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                # juxtaposition: "u^3 v", "3u", "2(u+v)"
                acc = acc * self.parse_factor()
            else:
                return acc

    def parse_factor(self):
        kind, val = self.take()
        if kind == "num":
            base = self.one * float(val)
        elif kind == "name":
            try:
                base = self.variables[val]
            except KeyError:
                allowed = ", ".join(sorted(self.variables))
                raise ParseError(
                    f"unknown variable {val!r} (allowed: {allowed})"
                ) from None
        elif kind == "op" and val == "(":
            base = self.parse_expr()
            self.expect_op(")")
        else:
            raise ParseError(f"unexpected token {val!r}")
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            ekind, eval_ = self.take()
            if ekind != "num" or not re.fullmatch(r"\d+", eval_):
                raise ParseError(f"exponent must be a non-negative integer, got {eval_!r}")
            power = int(eval_)
            out = self.one * 1.0
            for _ in range(power):
                out = out * base
            return out
        return base

    def finished(self) -> bool:
        return self.pos >= len(self.tokens)


def _split_top_level(text: str) -> list[str]:
    """Split on commas outside parentheses, stripping one outer pair."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        depth = 0
        wraps = True
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0 and i != len(s) - 1:
                    wraps = False
                    break
        if wraps:
            s = s[1:-1]
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses")
        elif ch == "," and depth == 0:
            parts.append(s[start:i])
            start = i + 1
    if depth != 0:
        raise ParseError("unbalanced parentheses")
    parts.append(s[start:])
    return parts


def _parse_one(text: str, variables, one):
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens, variables, one)
    result = parser.parse_expr()
    if not parser.finished():
        raise ParseError(f"trailing input after expression: {text!r}")
    return result


def parse_map(text: str) -> tuple[Poly2, Poly2]:
    """Parse '(P(u,v), Q(u,v))' into a pair of two-variable polynomials."""
    parts = _split_top_level(text)
    if len(parts) != 2:
        raise ParseError(f"a plane map needs exactly 2 components, got {len(parts)}")
    variables = {"u": Poly2.variable(1), "v": Poly2.variable(2)}
    one = Poly2.constant(1.0)
    return tuple(_parse_one(p, variables, one) for p in parts)


def parse_curve(text: str) -> tuple[Poly1, Poly1]:
    """Parse 'a(t), b(t)' into a pair of one-variable polynomials."""
    parts = _split_top_level(text)
    if len(parts) != 2:
        raise ParseError(f"a curve needs exactly 2 components, got {len(parts)}")
    variables = {"t": Poly1.identity()}
    one = Poly1.constant(1.0)
    return tuple(_parse_one(p, variables, one) for p in parts)


def parse_reals(text: str, count: int | None = None) -> tuple[float, ...]:
    """Parse a comma-separated list of real numbers."""
    parts = [p.strip() for p in text.split(",")]
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(values) != count:
        raise ParseError(f"expected {count} numbers, got {len(values)} in {text!r}")
    return values
