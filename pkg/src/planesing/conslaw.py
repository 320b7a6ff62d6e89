"""First singularities of characteristic surfaces of a planar scalar
conservation law.

For a conservation law with flux (f1(y), f2(y)) and initial profile
phi(u1, u2), characteristics emanating from (u1, u2) move with the
constant velocity (f1'(phi), f2'(phi)); freezing a time t gives the
plane-to-plane map

    g_t(u) = (u1 + t f1'(phi(u)), u2 + t f2'(phi(u))).

Writing C(u) for the Jacobian of the characteristic velocity field --
the rank-one matrix with entries c_ij = f_i''(phi(u)) phi_uj(u) -- the
discriminant of g_t collapses to

    lambda_{g_t}(u) = det(I + t C(u)) = 1 + t trace C(u)

exactly, because det C vanishes identically.  A point u first goes
singular at t(u) = -1 / trace C(u) (only where the trace is negative),
so the earliest singularity in a region minimizes t(u), i.e. extremizes
the trace.  The gradient and Hessian determinant of 1/t drive both the
search and the generic-versus-degenerate verdict; they are available
in closed form through fourth derivatives of the flux and third
derivatives of the profile, and independently through jet arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .germs import (
    DEFAULT_TOLERANCES,
    ClassificationReport,
    PlaneMapGerm,
    ToleranceConfig,
    classify,
)
from .jets import compose_univariate, poly_to_jet
from .locus import BoxDomain
from .poly import InvalidSpec, Poly1, Poly2, poly_from_spec, poly_to_spec

__all__ = [
    "ConsLawProblem",
    "ShapeOperator",
    "FirstSingularity",
    "Frame",
    "SolverFailed",
    "characteristic_map",
    "shape_operator",
    "singular_time_field",
    "xi_closed_form",
    "xi_autodiff",
    "first_singularity",
    "singularity_at",
    "lips_birth_frames",
    "builtin_problem",
    "BUILTIN_PROBLEMS",
]

#: relative tie window for competing minimizers of the singular time
TIME_TIE_REL = 1e-9


class SolverFailed(RuntimeError):
    """The box search could not certify an interior first singularity.

    best_point / best_time record the most singular grid node seen, so
    a caller can restart with a shifted box or finer grid.
    """

    def __init__(self, message: str, best_point=None, best_time=None):
        super().__init__(message)
        self.best_point = best_point
        self.best_time = best_time


@dataclass(eq=False)
class ConsLawProblem:
    """Flux pair and initial profile, all polynomial.

    f1, f2 are one-variable polynomials (the flux components as
    functions of the conserved quantity); phi is the two-variable
    initial profile.
    """

    f1: Poly1
    f2: Poly1
    phi: Poly2

    def __post_init__(self):
        if not isinstance(self.f1, Poly1) or not isinstance(self.f2, Poly1):
            raise InvalidSpec("flux components must be one-variable polynomials")
        if not isinstance(self.phi, Poly2):
            raise InvalidSpec("initial profile must be a two-variable polynomial")

    @classmethod
    def from_dict(cls, data: Mapping) -> "ConsLawProblem":
        try:
            f1 = poly_from_spec(data["f1"])
            f2 = poly_from_spec(data["f2"])
            phi = poly_from_spec(data["phi"])
        except KeyError as exc:
            raise InvalidSpec(f"problem needs keys f1, f2, phi; missing {exc}") from exc
        if not isinstance(f1, Poly1) or not isinstance(f2, Poly1):
            raise InvalidSpec("f1 and f2 must have vars=1")
        if not isinstance(phi, Poly2):
            raise InvalidSpec("phi must have vars=2")
        return cls(f1, f2, phi)

    def to_dict(self) -> dict:
        return {
            "f1": poly_to_spec(self.f1),
            "f2": poly_to_spec(self.f2),
            "phi": poly_to_spec(self.phi),
        }

    def flux_deriv(self, component: int, m: int) -> Poly1:
        f = self.f1 if component == 1 else self.f2
        return f.derivative(m)

    @cached_property
    def trace_poly(self) -> Poly2:
        """trace C as an exact polynomial: f1''(phi) phi_1 + f2''(phi) phi_2."""
        p1, p2 = self.phi.partial(1), self.phi.partial(2)
        return (
            self.f1.derivative(2).compose2(self.phi) * p1
            + self.f2.derivative(2).compose2(self.phi) * p2
        )


@dataclass(frozen=True)
class ShapeOperator:
    """Jacobian of the characteristic velocity field at one point.

    entries is the 2x2 matrix c_ij = f_i''(phi(u)) phi_uj(u); its
    determinant vanishes identically (the rows are proportional), so
    the eigenvalues are 0 and trace.
    """

    entries: tuple[tuple[float, float], tuple[float, float]]
    trace: float

    def to_dict(self) -> dict:
        return {"entries": [list(r) for r in self.entries], "trace": self.trace}


def characteristic_map(prob: ConsLawProblem, t: float, base=(0.0, 0.0)) -> PlaneMapGerm:
    """The time-t characteristic map as a polynomial germ at ``base``."""
    t = float(t)
    u1, u2 = Poly2.variable(1), Poly2.variable(2)
    v1 = prob.f1.derivative().compose2(prob.phi)
    v2 = prob.f2.derivative().compose2(prob.phi)
    return PlaneMapGerm((u1 + t * v1, u2 + t * v2), base)


def shape_operator(prob: ConsLawProblem, u) -> ShapeOperator:
    y = prob.phi(u)
    a2 = prob.f1.derivative(2)(y)
    b2 = prob.f2.derivative(2)(y)
    p1 = prob.phi.partial(1)(u)
    p2 = prob.phi.partial(2)(u)
    entries = ((a2 * p1, a2 * p2), (b2 * p1, b2 * p2))
    return ShapeOperator(entries=entries, trace=entries[0][0] + entries[1][1])


def singular_time_field(
    prob: ConsLawProblem, u, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> float | None:
    """Time at which the characteristic map first degenerates over u.

    1 + t trace C(u) = 0 has a positive solution only for negative
    trace; None means no finite positive singular time at this point.
    """
    op = shape_operator(prob, u)
    scale = max(abs(e) for row in op.entries for e in row)
    if op.trace >= -tol.zero_rel * max(scale, 1e-300):
        return None
    return -1.0 / op.trace


def _phi_data(prob: ConsLawProblem, u):
    """All profile derivatives through order three and flux values at phi(u)."""
    phi = prob.phi
    y = phi(u)
    p1 = phi.partial(1)
    p2 = phi.partial(2)
    d = {
        "p1": p1(u),
        "p2": p2(u),
        "p11": p1.partial(1)(u),
        "p12": p1.partial(2)(u),
        "p22": p2.partial(2)(u),
        "p111": p1.partial(1).partial(1)(u),
        "p112": p1.partial(1).partial(2)(u),
        "p122": p1.partial(2).partial(2)(u),
        "p222": p2.partial(2).partial(2)(u),
    }
    flux = {
        "a2": prob.f1.derivative(2)(y),
        "a3": prob.f1.derivative(3)(y),
        "a4": prob.f1.derivative(4)(y),
        "b2": prob.f2.derivative(2)(y),
        "b3": prob.f2.derivative(3)(y),
        "b4": prob.f2.derivative(4)(y),
    }
    return d, flux


def xi_closed_form(prob: ConsLawProblem, u) -> tuple[float, float, float]:
    """Gradient and Hessian determinant of the reciprocal singular time.

    Returns (xi1, xi2, xi3) where xi1, xi2 are the partials of 1/t(u)
    and xi3 = det Hess(1/t).  Since 1/t = -trace C, the gradient is the
    negated gradient of the trace while the Hessian determinant is
    unaffected by the sign (two dimensions).  Everything is expressed
    directly in flux derivatives at y = phi(u) and profile derivatives
    at u, with no composition machinery involved; the independent jet
    route is xi_autodiff.
    """
    d, flux = _phi_data(prob, u)
    p1, p2 = d["p1"], d["p2"]
    p11, p12, p22 = d["p11"], d["p12"], d["p22"]
    p111, p112, p122, p222 = d["p111"], d["p112"], d["p122"], d["p222"]
    a2, a3, a4 = flux["a2"], flux["a3"], flux["a4"]
    b2, b3, b4 = flux["b2"], flux["b3"], flux["b4"]

    trace_u1 = a3 * p1 * p1 + b3 * p1 * p2 + a2 * p11 + b2 * p12
    trace_u2 = a3 * p1 * p2 + b3 * p2 * p2 + a2 * p12 + b2 * p22

    # Recurring combinations: S pairs second derivatives of phi with the
    # squared gradient; T1, T2 do the same with third derivatives.
    S = p1 * p1 * p22 - 2.0 * p1 * p2 * p12 + p2 * p2 * p11
    T1 = p1 * p1 * p122 - 2.0 * p1 * p2 * p112 + p2 * p2 * p111
    T2 = p1 * p1 * p222 - 2.0 * p1 * p2 * p122 + p2 * p2 * p112

    xi3 = (
        a4 * (a3 * p1 * p1 * S + a2 * p1 * T1 + b3 * p1 * p2 * S + b2 * p1 * T2)
        + b4 * (a3 * p1 * p2 * S + a2 * p2 * T1 + b3 * p2 * p2 * S + b2 * p2 * T2)
        + a3 * a3 * (
            p1 * p11 * (3.0 * p1 * p22 + 2.0 * p2 * p12)
            - 4.0 * p1 * p1 * p12 * p12
            - p2 * p2 * p11 * p11
        )
        + b3 * b3 * (
            p2 * p22 * (2.0 * p1 * p12 + 3.0 * p2 * p11)
            - p1 * p1 * p22 * p22
            - 4.0 * p2 * p2 * p12 * p12
        )
        + a3 * b3 * (
            -2.0 * p1 * p1 * p12 * p22
            - 4.0 * p1 * p2 * p12 * p12
            + 8.0 * p1 * p2 * p11 * p22
            - 2.0 * p2 * p2 * p11 * p12
        )
        + a3 * (
            a2 * (
                3.0 * p1 * p11 * p122
                - 4.0 * p1 * p12 * p112
                - 2.0 * p2 * p11 * p112
                + p1 * p22 * p111
                + 2.0 * p2 * p12 * p111
            )
            + b2 * (
                -4.0 * p1 * p12 * p122
                + 3.0 * p1 * p11 * p222
                - 2.0 * p2 * p11 * p122
                + p1 * p22 * p112
                + 2.0 * p2 * p12 * p112
            )
        )
        + b3 * (
            a2 * (
                2.0 * p1 * p12 * p122
                + p2 * p11 * p122
                - 2.0 * p1 * p22 * p112
                - 4.0 * p2 * p12 * p112
                + 3.0 * p2 * p22 * p111
            )
            + b2 * (
                2.0 * p1 * p12 * p222
                - 2.0 * p1 * p22 * p122
                - 4.0 * p2 * p12 * p122
                + p2 * p11 * p222
                + 3.0 * p2 * p22 * p112
            )
        )
        + a2 * a2 * (p111 * p122 - p112 * p112)
        + b2 * b2 * (p112 * p222 - p122 * p122)
        + a2 * b2 * (p111 * p222 - p112 * p122)
    )
    return (-trace_u1, -trace_u2, xi3)


def xi_autodiff(prob: ConsLawProblem, u) -> tuple[float, float, float]:
    """Same three quantities via order-3 jet arithmetic.

    Builds the jet of trace C at u by composing flux-derivative jets
    with the profile jet, then reads the gradient and Hessian off the
    coefficients.  Serves as an independent oracle for the closed form.
    """
    phi4 = poly_to_jet(prob.phi, u, 4)
    phi3 = phi4.truncate(3)
    phi_1 = phi4.partial(1)
    phi_2 = phi4.partial(2)
    y0 = phi4.value
    a = compose_univariate(poly_to_jet(prob.f1.derivative(2), y0, 3), phi3)
    b = compose_univariate(poly_to_jet(prob.f2.derivative(2), y0, 3), phi3)
    tau = a * phi_1 + b * phi_2
    t1 = tau.deriv(1, 0)
    t2 = tau.deriv(0, 1)
    t11 = tau.deriv(2, 0)
    t12 = tau.deriv(1, 1)
    t22 = tau.deriv(0, 2)
    return (-t1, -t2, t11 * t22 - t12 * t12)


@dataclass
class FirstSingularity:
    """Outcome of locating and classifying an earliest singular point.

    xi holds (xi1, xi2, xi3) at the point; xi1 and xi2 vanish there by
    construction.  xi3_degenerate is set when xi3 is not solidly
    nonzero, warning that the generic verdict is not certified.
    co_minimizers lists other located points whose singular times tie
    with t_star within relative TIME_TIE_REL; the reported point is the
    lexicographically smallest of the tie.
    """

    u_star: tuple[float, float]
    t_star: float
    trace: float
    xi: tuple[float, float, float]
    xi3_degenerate: bool
    report: ClassificationReport
    co_minimizers: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "u_star": list(self.u_star),
            "t_star": self.t_star,
            "trace": self.trace,
            "xi": list(self.xi),
            "xi3_degenerate": self.xi3_degenerate,
            "co_minimizers": [list(p) for p in self.co_minimizers],
            "report": self.report.to_dict(),
        }


@dataclass
class Frame:
    """Singular set of the characteristic map at one frozen time."""

    time: float
    curves: list
    image_curves: list

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "curves": [c.to_dict() for c in self.curves],
            "image_curves": [c.to_dict() for c in self.image_curves],
        }


def _hess_trace_polys(prob: ConsLawProblem):
    tau = prob.trace_poly
    t1, t2 = tau.partial(1), tau.partial(2)
    return tau, t1, t2, t1.partial(1), t1.partial(2), t2.partial(2)


def _stacked_tables(*polys: Poly2) -> np.ndarray:
    """Dense coefficient tables stacked on a trailing axis."""
    tabs = [p._dense_table() for p in polys]
    di = max(t.shape[0] for t in tabs)
    dj = max(t.shape[1] for t in tabs)
    c = np.zeros((di, dj, len(tabs)))
    for k, t in enumerate(tabs):
        c[: t.shape[0], : t.shape[1], k] = t
    return c


def _polyval2d(x: float, y: float, c: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval2d(x, y, c)


def first_singularity(
    prob: ConsLawProblem,
    box: BoxDomain,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> FirstSingularity | None:
    """Earliest positive singular time of the characteristic family in a box.

    Scans the singular-time field on the grid, polishes the most
    promising nodes with Newton on the trace gradient, and keeps the
    interior critical point with the smallest time.  Returns None when
    the trace is nowhere negative on the grid (no characteristic
    crossing in the box).  Raises SolverFailed when no critical point
    converges, or when the grid minimum beats every converged critical
    point -- that means the true minimizer sits on the box boundary or
    was missed, and reporting it as a first singularity would be wrong.
    """
    tau, t1, t2, t11, t12, t22 = _hess_trace_polys(prob)
    xs, ys = box.axes()
    U1, U2 = np.meshgrid(xs, ys, indexing="ij")
    tg = tau.eval_grid(U1, U2)
    neg = tg < 0.0
    if not bool(np.any(neg)):
        return None

    tau_min = float(np.min(tg))
    idx_min = np.unravel_index(int(np.argmin(tg)), tg.shape)
    grid_best_point = (float(xs[idx_min[0]]), float(ys[idx_min[1]]))
    t_grid_min = -1.0 / tau_min

    # Seeds: the most negative trace nodes plus every interior local
    # minimum of the trace over the negative region.
    flat_order = np.argsort(tg, axis=None)
    seeds: list[tuple[float, float]] = []
    for k in flat_order[:16]:
        i, j = np.unravel_index(int(k), tg.shape)
        if neg[i, j]:
            seeds.append((float(xs[i]), float(ys[j])))
    for i in range(1, tg.shape[0] - 1):
        for j in range(1, tg.shape[1] - 1):
            if not neg[i, j]:
                continue
            window = tg[i - 1 : i + 2, j - 1 : j + 2]
            if tg[i, j] <= float(np.min(window)):
                seeds.append((float(xs[i]), float(ys[j])))

    from .locus import _newton2  # shared damped Newton

    # stack the gradient and Hessian coefficient tables so each Newton
    # step costs two Horner evaluations instead of five
    grad_c = _stacked_tables(t1, t2)
    hess_c = _stacked_tables(t11, t12, t22)

    def system(x):
        return _polyval2d(float(x[0]), float(x[1]), grad_c)

    def jacobian(x):
        a, b, c = _polyval2d(float(x[0]), float(x[1]), hess_c)
        return ((a, b), (b, c))

    roots: list[tuple[float, tuple[float, float]]] = []
    for s in seeds:
        x, _, ok = _newton2(system, jacobian, s, tol, box)
        if not ok or not box.contains(x):
            continue
        tv = tau((x[0], x[1]))
        if tv >= 0.0:
            continue
        pt = (float(x[0]), float(x[1]))
        if any((pt[0] - q[0]) ** 2 + (pt[1] - q[1]) ** 2 <= 1e-12 for _, q in roots):
            continue
        roots.append((-1.0 / tv, pt))

    if not roots:
        raise SolverFailed(
            "no interior critical point of the singular-time field converged",
            best_point=grid_best_point,
            best_time=t_grid_min,
        )

    roots.sort(key=lambda r: (r[0], r[1][0], r[1][1]))
    t_star = roots[0][0]
    if t_star > t_grid_min + TIME_TIE_REL * (1.0 + abs(t_grid_min)):
        raise SolverFailed(
            "the singular-time minimum over the box is not an interior critical "
            "point (earliest grid time beats every converged critical point)",
            best_point=grid_best_point,
            best_time=t_grid_min,
        )

    ties = [r for r in roots if r[0] <= t_star + TIME_TIE_REL * (1.0 + abs(t_star))]
    point = ties[0][1]
    co_minimizers = [r[1] for r in ties[1:]]

    return _analyze_point(prob, point, t_star, tol, co_minimizers)


def _analyze_point(prob, point, t, tol, co_minimizers) -> FirstSingularity:
    xi = xi_closed_form(prob, point)
    tau_val = prob.trace_poly(point)
    h11 = prob.trace_poly.partial(1).partial(1)(point)
    h12 = prob.trace_poly.partial(1).partial(2)(point)
    h22 = prob.trace_poly.partial(2).partial(2)(point)
    hess_scale = max(abs(h11), abs(h12), abs(h22))
    xi3_solid = abs(xi[2]) >= 10.0 * tol.zero_rel * max(hess_scale**2, 1e-300)
    germ = characteristic_map(prob, t, point)
    report = classify(germ, tol)
    return FirstSingularity(
        u_star=(float(point[0]), float(point[1])),
        t_star=float(t),
        trace=float(tau_val),
        xi=tuple(float(x) for x in xi),
        xi3_degenerate=not xi3_solid,
        report=report,
        co_minimizers=co_minimizers,
    )


def singularity_at(
    prob: ConsLawProblem,
    u,
    t: float | None = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> FirstSingularity:
    """Classify the characteristic map at a chosen point and time.

    With t omitted, the point's own singular time is used; a point
    whose trace is non-negative then has no singular time and raises
    ValueError.  No search or minimality claim is involved, so the
    returned record never lists co-minimizers.
    """
    u = (float(u[0]), float(u[1]))
    if t is None:
        t = singular_time_field(prob, u, tol)
        if t is None:
            raise ValueError(
                f"characteristic trace is non-negative at {u}; no positive singular time"
            )
    return _analyze_point(prob, u, float(t), tol, [])


def lips_birth_frames(
    prob: ConsLawProblem,
    u_star,
    t_star: float,
    times,
    box: BoxDomain,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> list[Frame]:
    """Singular sets of the frozen-time maps before and after t_star.

    times must straddle t_star (at least one strictly below and one
    strictly above), since the point of the exercise is watching the
    singular curve be born around u_star.  Each frame carries the
    traced source-plane curves and their images in the target plane.
    """
    from .locus import critical_value_image, sample_singular_set

    times = [float(t) for t in times]
    if not times or min(times) >= t_star or max(times) <= t_star:
        raise ValueError("frame times must straddle the singular time")
    base = (float(u_star[0]), float(u_star[1]))
    frames = []
    for t in times:
        germ = characteristic_map(prob, t, base)
        curves = sample_singular_set(germ, box, tol)
        frames.append(
            Frame(time=t, curves=curves, image_curves=critical_value_image(germ, curves))
        )
    return frames


def builtin_problem(name: str) -> ConsLawProblem:
    """Small named problems with a single quadratic flux component.

    burgers-lips        cubic one-bump profile focusing to a generic
                        first singularity at the origin, t = 1
    burgers-saddle      same profile with the transverse term flipped;
                        the trace has a saddle instead of a minimum
    burgers-rarefaction linear profile with positive slope; the
                        characteristics spread and nothing ever focuses
    """
    y2 = Poly1({2: 0.5})
    zero = Poly1()
    u1 = Poly2.variable(1)
    table = {
        "burgers-lips": ConsLawProblem(
            y2, zero, Poly2({(1, 0): -1.0, (3, 0): 1.0, (1, 2): 1.0})
        ),
        "burgers-saddle": ConsLawProblem(
            y2, zero, Poly2({(1, 0): -1.0, (3, 0): 1.0, (1, 2): -1.0})
        ),
        "burgers-rarefaction": ConsLawProblem(y2, zero, u1),
    }
    try:
        return table[name]
    except KeyError:
        raise KeyError(
            f"unknown builtin problem {name!r}; choose from {sorted(table)}"
        ) from None


BUILTIN_PROBLEMS = ("burgers-lips", "burgers-saddle", "burgers-rarefaction")
