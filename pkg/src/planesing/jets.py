"""Truncated Taylor expansions (jets) with order-aware arithmetic.

A jet stores the Taylor coefficients of a smooth function at a base
point up to a fixed total order.  Sums, products, and compositions of
jets silently truncate everything beyond that order, so a chain of jet
operations computes exactly the derivatives the final order can carry
and nothing more.  All coefficient arrays are frozen after
construction; operations return new jets.

Coefficients are stored in the monomial basis: a `Jet2` with
coefficient table ``c`` represents ``sum c[i, j] * (u1 - p1)**i *
(u2 - p2)**j`` over ``i + j <= order``, so the (i, j)-th partial
derivative at the base point is ``c[i, j] * i! * j!``.
"""

from __future__ import annotations

import math

import numpy as np

from .poly import InvalidSpec, Poly1, Poly2, poly_from_spec

__all__ = [
    "Jet1",
    "Jet2",
    "InvalidJetCombination",
    "JetOrderExhausted",
    "CompositionBasePointMismatch",
    "InvalidSpec",
    "det2x2",
    "compose_univariate",
    "compose_map",
    "poly_to_jet",
]

DEFAULT_ORDER_1D = 6
DEFAULT_ORDER_2D = 4

#: how closely an inner jet's value must hit the outer jet's base point
#: before composition is considered meaningful
BASE_MATCH_TOL = 1e-9


class InvalidJetCombination(ValueError):
    """Operands disagree on base point or arity."""


class JetOrderExhausted(ValueError):
    """A derivative or composition would need more orders than the jet holds."""


class CompositionBasePointMismatch(ValueError):
    """Inner jet's value does not sit at the outer jet's base point."""


def _finite_or_raise(arr):
    if not np.all(np.isfinite(arr)):
        raise InvalidSpec("jet coefficients must be finite")


class Jet1:
    """Taylor polynomial of one variable: coeffs[k] multiplies (y - base)**k."""

    __slots__ = ("base_point", "order", "coeffs")

    def __init__(self, base_point: float, coeffs, order: int | None = None):
        c = np.asarray(coeffs, dtype=float).copy()
        if c.ndim != 1:
            raise InvalidSpec("Jet1 coefficients must be one-dimensional")
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise InvalidSpec("jet order must be non-negative")
        if len(c) != order + 1:
            full = np.zeros(order + 1)
            full[: min(len(c), order + 1)] = c[: order + 1]
            c = full
        _finite_or_raise(c)
        c.setflags(write=False)
        self.base_point = float(base_point)
        self.order = int(order)
        self.coeffs = c

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivative(self) -> "Jet1":
        if self.order == 0:
            raise JetOrderExhausted("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1)
        return Jet1(self.base_point, self.coeffs[1:] * k, self.order - 1)

    def deriv(self, k: int) -> float:
        """k-th derivative value at the base point."""
        if k > self.order:
            raise JetOrderExhausted(f"order {self.order} jet has no k={k} derivative")
        return float(self.coeffs[k] * math.factorial(k))

    def truncate(self, order: int) -> "Jet1":
        if order > self.order:
            raise JetOrderExhausted(f"cannot extend order {self.order} to {order}")
        return Jet1(self.base_point, self.coeffs[: order + 1], order)

    def __call__(self, y: float) -> float:
        dy = float(y) - self.base_point
        return float(sum(c * dy**k for k, c in enumerate(self.coeffs)))

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def __repr__(self):
        return f"Jet1(base={self.base_point!r}, order={self.order}, coeffs={self.coeffs.tolist()!r})"


def _common_base2(a: "Jet2", b: "Jet2") -> tuple[float, float]:
    if a.base_point != b.base_point:
        raise InvalidJetCombination(
            f"base points differ: {a.base_point} vs {b.base_point}"
        )
    return a.base_point


def _common_order2(a: "Jet2", b: "Jet2") -> int:
    if a.order != b.order:
        raise InvalidJetCombination(f"orders differ: {a.order} vs {b.order}")
    return a.order


class Jet2:
    """Taylor polynomial of two variables, truncated at a total order.

    The coefficient table is (order+1) x (order+1) with entries beyond
    the triangle i + j <= order forced to zero.
    """

    __slots__ = ("base_point", "order", "coeffs")

    def __init__(self, base_point, coeffs, order: int | None = None):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InvalidSpec("Jet2 coefficients must form a square table")
        if order is None:
            order = c.shape[0] - 1
        if order < 0:
            raise InvalidSpec("jet order must be non-negative")
        n = order + 1
        table = np.zeros((n, n))
        m = min(n, c.shape[0])
        table[:m, :m] = c[:m, :m]
        for i in range(n):
            for j in range(n):
                if i + j > order:
                    table[i, j] = 0.0
        _finite_or_raise(table)
        table.setflags(write=False)
        self.base_point = (float(base_point[0]), float(base_point[1]))
        self.order = int(order)
        self.coeffs = table

    @classmethod
    def constant(cls, value: float, base_point, order: int) -> "Jet2":
        t = np.zeros((order + 1, order + 1))
        t[0, 0] = value
        return cls(base_point, t, order)

    @property
    def value(self) -> float:
        return float(self.coeffs[0, 0])

    def deriv(self, i: int, j: int) -> float:
        """Partial derivative value (d/du1)^i (d/du2)^j at the base point."""
        if i + j > self.order:
            raise JetOrderExhausted(f"order {self.order} jet has no ({i},{j}) derivative")
        return float(self.coeffs[i, j] * math.factorial(i) * math.factorial(j))

    def partial(self, axis: int) -> "Jet2":
        if self.order == 0:
            raise JetOrderExhausted("cannot differentiate an order-0 jet")
        n = self.order
        out = np.zeros((n, n))
        if axis == 1:
            for i in range(1, n + 1):
                out[i - 1, : n + 1 - i] = i * self.coeffs[i, : n + 1 - i]
        elif axis == 2:
            for j in range(1, n + 1):
                out[: n + 1 - j, j - 1] = j * self.coeffs[: n + 1 - j, j]
        else:
            raise ValueError("axis must be 1 or 2")
        return Jet2(self.base_point, out, n - 1)

    def truncate(self, order: int) -> "Jet2":
        if order > self.order:
            raise JetOrderExhausted(f"cannot extend order {self.order} to {order}")
        return Jet2(self.base_point, self.coeffs[: order + 1, : order + 1], order)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Jet2.constant(other, self.base_point, self.order)
        if not isinstance(other, Jet2):
            return NotImplemented
        base = _common_base2(self, other)
        n = _common_order2(self, other)
        return Jet2(base, self.coeffs + other.coeffs, n)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(self.base_point, -self.coeffs, self.order)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-other)
        if not isinstance(other, Jet2):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Jet2(self.base_point, self.coeffs * other, self.order)
        if not isinstance(other, Jet2):
            return NotImplemented
        base = _common_base2(self, other)
        n = _common_order2(self, other)
        out = np.zeros((n + 1, n + 1))
        for i in range(n + 1):
            for j in range(n + 1 - i):
                ca = self.coeffs[i, j]
                if ca == 0.0:
                    continue
                for a in range(n + 1 - i - j):
                    for b in range(n + 1 - i - j - a):
                        cb = other.coeffs[a, b]
                        if cb != 0.0:
                            out[i + a, j + b] += ca * cb
        return Jet2(base, out, n)

    __rmul__ = __mul__

    def __call__(self, u) -> float:
        d1 = float(u[0]) - self.base_point[0]
        d2 = float(u[1]) - self.base_point[1]
        total = 0.0
        for i in range(self.order + 1):
            for j in range(self.order + 1 - i):
                c = self.coeffs[i, j]
                if c != 0.0:
                    total += c * d1**i * d2**j
        return float(total)

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self):
        return (
            f"Jet2(base={self.base_point!r}, order={self.order}, "
            f"coeffs={self.coeffs.tolist()!r})"
        )


def det2x2(a11: Jet2, a12: Jet2, a21: Jet2, a22: Jet2) -> Jet2:
    """Determinant of a 2x2 matrix of jets, truncated like any jet product."""
    return a11 * a22 - a12 * a21


def compose_univariate(outer: Jet1, inner: Jet2) -> Jet2:
    """Jet of outer(inner(u1, u2)) at the inner jet's base point.

    The inner jet's value must land on the outer jet's base point
    (within BASE_MATCH_TOL), since the outer expansion is only valid
    there.  The outer jet must carry at least as many orders as the
    inner one, because the composite needs outer derivatives up to the
    inner order.
    """
    if abs(inner.value - outer.base_point) > BASE_MATCH_TOL * (1.0 + abs(outer.base_point)):
        raise CompositionBasePointMismatch(
            f"inner value {inner.value} is not at outer base {outer.base_point}"
        )
    n = inner.order
    if outer.order < n:
        raise JetOrderExhausted(
            f"outer jet order {outer.order} < inner jet order {n}"
        )
    delta = inner - inner.value  # vanishes at the base point
    result = Jet2.constant(float(outer.coeffs[n]), inner.base_point, n)
    for k in range(n - 1, -1, -1):
        result = result * delta + float(outer.coeffs[k])
    return result


def compose_map(outer: Jet2, inner1: Jet2, inner2: Jet2) -> Jet2:
    """Jet of outer(inner1(u), inner2(u)) at the inner jets' base point."""
    base = _common_base2(inner1, inner2)
    for comp, ob in ((inner1, outer.base_point[0]), (inner2, outer.base_point[1])):
        if abs(comp.value - ob) > BASE_MATCH_TOL * (1.0 + abs(ob)):
            raise CompositionBasePointMismatch(
                f"inner value {comp.value} is not at outer base coordinate {ob}"
            )
    n = min(outer.order, inner1.order, inner2.order)
    x = (inner1 - inner1.value).truncate(n)
    y = (inner2 - inner2.value).truncate(n)
    xp: list[Jet2] = [Jet2.constant(1.0, base, n)]
    yp: list[Jet2] = [Jet2.constant(1.0, base, n)]
    for _ in range(n):
        xp.append(xp[-1] * x)
        yp.append(yp[-1] * y)
    result = Jet2.constant(0.0, base, n)
    for i in range(n + 1):
        for j in range(n + 1 - i):
            c = outer.coeffs[i, j]
            if c != 0.0:
                result = result + (xp[i] * yp[j]) * c
    return result


def poly_to_jet(spec, base_point, order: int | None = None):
    """Jet of a polynomial at ``base_point`` (exact Taylor re-centering).

    ``spec`` may be a PolySpec mapping or an already-built Poly1/Poly2.
    The arity is taken from the polynomial and must match the base
    point: a scalar base for one variable, a pair for two.
    """
    if isinstance(spec, (Poly1, Poly2)):
        p = spec
    else:
        p = poly_from_spec(spec)
    if isinstance(p, Poly1):
        if hasattr(base_point, "__len__") and not isinstance(base_point, str):
            raise InvalidSpec("one-variable polynomial needs a scalar base point")
        if order is None:
            order = DEFAULT_ORDER_1D
        return Jet1(float(base_point), p.recentered_coeffs(float(base_point), order), order)
    if not hasattr(base_point, "__len__") or len(base_point) != 2:
        raise InvalidSpec("two-variable polynomial needs a two-component base point")
    if order is None:
        order = DEFAULT_ORDER_2D
    return Jet2(base_point, p.recentered_coeffs(base_point, order), order)
