"""Tracing singular sets and hunting distinguished points in a box.

The singular set of a polynomial plane map is the zero level set of
its discriminant.  This module walks that level set over a rectangular
domain with a marching-squares pass (linear interpolation on cell
edges, center-sample disambiguation for saddle cells), sharpens every
vertex with a damped Newton projection along the discriminant
gradient, and links the cell segments into polylines.

On top of the traced curves it searches for the two kinds of points
the classification tree cares about beyond folds: critical points of
the discriminant lying on the set (lips/beaks material) and points
where the null-direction derivative of the discriminant vanishes on
the set (cusp/swallowtail material).  Each located point is classified
by re-basing the germ there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .germs import (
    DEFAULT_TOLERANCES,
    ClassificationReport,
    PlaneMapGerm,
    ToleranceConfig,
    classify,
    null_field,
)
from .poly import Poly1, Poly2, poly_from_spec

__all__ = [
    "BoxDomain",
    "CurveSample",
    "SpecialPoint",
    "NotRegularCurve",
    "sample_singular_set",
    "find_special_points",
    "critical_value_image",
    "ruling_map",
]

#: points closer than this (in source-plane distance) are one point
DEDUP_RADIUS = 1e-6

#: Newton step-size floor; with the residual bound, defines convergence
STEP_TOL = 1e-12


class NotRegularCurve(ValueError):
    """The generating curve has a vanishing velocity at the base parameter."""


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned search box with a node grid.

    grid counts cells per axis, so axis k carries grid[k] + 1 sample
    nodes including both endpoints.
    """

    lo: tuple[float, float]
    hi: tuple[float, float]
    grid: tuple[int, int] = (64, 64)

    def __post_init__(self):
        lo = (float(self.lo[0]), float(self.lo[1]))
        hi = (float(self.hi[0]), float(self.hi[1]))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "grid", (int(self.grid[0]), int(self.grid[1])))
        if not (lo[0] < hi[0] and lo[1] < hi[1]):
            raise ValueError(f"box must have positive extent, got lo={lo} hi={hi}")
        if self.grid[0] < 2 or self.grid[1] < 2:
            raise ValueError("grid needs at least 2 cells per axis")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.lo[0], self.hi[0], self.grid[0] + 1),
            np.linspace(self.lo[1], self.hi[1], self.grid[1] + 1),
        )

    def contains(self, u, slack: float = 1e-9) -> bool:
        sx = slack * (1.0 + abs(self.hi[0] - self.lo[0]))
        sy = slack * (1.0 + abs(self.hi[1] - self.lo[1]))
        return (
            self.lo[0] - sx <= u[0] <= self.hi[0] + sx
            and self.lo[1] - sy <= u[1] <= self.hi[1] + sy
        )


@dataclass
class CurveSample:
    """One traced connected component of the singular set.

    vertices are ordered along the curve; residuals hold |lambda| at
    each vertex after Newton sharpening; closed marks a loop (the first
    vertex is not repeated at the end).
    """

    vertices: list[tuple[float, float]]
    residuals: list[float]
    closed: bool

    def to_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "residuals": self.residuals,
            "closed": self.closed,
        }


@dataclass
class SpecialPoint:
    """A sharpened candidate point with its classification.

    kind is 'DegenerateCandidate' for roots of grad lambda on the set
    and 'CuspCandidate' for roots of (lambda, eta lambda).
    """

    location: tuple[float, float]
    kind: str
    newton_residual: float
    report: ClassificationReport = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "location": list(self.location),
            "kind": self.kind,
            "newton_residual": self.newton_residual,
            "report": self.report.to_dict(),
        }


def _newton2(system, jacobian, x0, tol: ToleranceConfig, box: BoxDomain | None = None):
    """Damped two-dimensional Newton iteration.

    system and jacobian are callables returning a length-2 array and a
    2x2 array.  Steps that increase the residual norm are halved up to
    eight times; when no step length helps the iteration aborts.
    Returns (x, residual_norm, converged); convergence requires both a
    small step and a small residual.  Iterates that leave the box
    (when given) by a wide margin abort early.
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = np.asarray(system(x), dtype=float)
    rnorm = float(np.max(np.abs(fx)))
    converged = False
    for _ in range(tol.newton_max_iter):
        J = np.asarray(jacobian(x), dtype=float)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        t = 1.0
        accepted = False
        for _ in range(8):
            cand = x + t * step
            fc = np.asarray(system(cand), dtype=float)
            cnorm = float(np.max(np.abs(fc)))
            if cnorm <= rnorm or rnorm == 0.0:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # no step length shrinks the residual: the iteration has
            # stalled at a local minimum of |F| and cannot converge
            break
        x, fx, rnorm = cand, fc, cnorm
        if box is not None and not box.contains(x, slack=0.5):
            break
        if float(np.max(np.abs(t * step))) <= STEP_TOL * (1.0 + float(np.max(np.abs(x)))):
            if rnorm <= tol.newton_residual:
                converged = True
            break
        if rnorm <= tol.newton_residual and float(np.max(np.abs(step))) <= 1e3 * STEP_TOL:
            converged = True
            break
    else:
        converged = rnorm <= tol.newton_residual
    return x, rnorm, converged


# Marching squares: for each sign configuration of the four cell
# corners (bit order: SW, SE, NE, NW; bit set means value >= 0) list
# the pairs of crossed edges to connect.  Edges are numbered S=0, E=1,
# N=2, W=3.  Configurations 5 and 10 are ambiguous saddles resolved by
# the cell-center sample.
_SEGMENT_TABLE: dict[int, list[tuple[int, int]]] = {
    0: [],
    15: [],
    1: [(3, 0)],
    14: [(3, 0)],
    2: [(0, 1)],
    13: [(0, 1)],
    4: [(1, 2)],
    11: [(1, 2)],
    8: [(2, 3)],
    7: [(2, 3)],
    3: [(3, 1)],
    12: [(3, 1)],
    6: [(0, 2)],
    9: [(0, 2)],
}


def _edge_crossing(p0, p1, v0, v1):
    """Linear zero crossing on one edge; endpoints with v == 0 land exactly."""
    denom = v0 - v1
    t = 0.5 if denom == 0.0 else v0 / denom
    t = min(max(t, 0.0), 1.0)
    return (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))


def sample_singular_set(
    f: PlaneMapGerm,
    box: BoxDomain,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> list[CurveSample]:
    """Polyline approximations of the singular set inside the box.

    Node values exactly equal to zero are nudged to the positive side
    for sign bookkeeping, which keeps crossings on the correct edges
    without moving them (interpolation still lands on the node).
    Curves come back ordered deterministically: open chains first,
    then loops, each starting from its lexicographically smallest
    endpoint-cell index.
    """
    lam = f.discriminant_poly()
    lam1, lam2 = lam.partial(1), lam.partial(2)
    xs, ys = box.axes()
    U1, U2 = np.meshgrid(xs, ys, indexing="ij")
    vals = lam.eval_grid(U1, U2)
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale == 0.0:
        # identically zero on the grid: the whole box is singular;
        # report no curves rather than fabricating one
        return []

    pos = vals >= 0.0  # zero nudged positive

    nx, ny = box.grid
    # Edge keys: ("h", i, j) is the edge from node (i, j) to (i+1, j);
    # ("v", i, j) from (i, j) to (i, j+1).
    crossings: dict[tuple, tuple[float, float]] = {}

    def edge_point(kind, i, j):
        key = (kind, i, j)
        pt = crossings.get(key)
        if pt is None:
            if kind == "h":
                p0 = (xs[i], ys[j])
                p1 = (xs[i + 1], ys[j])
                v0, v1 = vals[i, j], vals[i + 1, j]
            else:
                p0 = (xs[i], ys[j])
                p1 = (xs[i], ys[j + 1])
                v0, v1 = vals[i, j], vals[i, j + 1]
            pt = _edge_crossing(p0, p1, v0, v1)
            crossings[key] = pt
        return key

    def cell_edge_key(i, j, e):
        if e == 0:
            return edge_point("h", i, j)
        if e == 1:
            return edge_point("v", i + 1, j)
        if e == 2:
            return edge_point("h", i, j + 1)
        return edge_point("v", i, j)

    segments: list[tuple[tuple, tuple]] = []
    for i in range(nx):
        for j in range(ny):
            code = (
                (1 if pos[i, j] else 0)
                | (2 if pos[i + 1, j] else 0)
                | (4 if pos[i + 1, j + 1] else 0)
                | (8 if pos[i, j + 1] else 0)
            )
            if code in (5, 10):
                center = ((xs[i] + xs[i + 1]) / 2.0, (ys[j] + ys[j + 1]) / 2.0)
                center_pos = lam(center) >= 0.0
                # Connect crossings so that each segment separates the
                # center from the corners of opposite sign.
                if code == 5:  # SW and NE positive
                    pairs = [(3, 0), (1, 2)] if center_pos else [(3, 2), (1, 0)]
                else:  # SE and NW positive
                    pairs = [(0, 1), (2, 3)] if center_pos else [(0, 3), (2, 1)]
            else:
                pairs = _SEGMENT_TABLE[code]
            for e0, e1 in pairs:
                segments.append((cell_edge_key(i, j, e0), cell_edge_key(i, j, e1)))

    if not segments:
        return []

    # Sharpen each crossing with a few damped Newton projections along
    # the gradient, x <- x - lam * grad / |grad|^2.
    resid_bound = tol.newton_residual * scale
    sharpened: dict[tuple, tuple[float, float]] = {}
    residuals: dict[tuple, float] = {}
    for key, pt in crossings.items():
        x, y = pt
        r = lam((x, y))
        for _ in range(tol.newton_max_iter):
            if abs(r) <= resid_bound:
                break
            gx, gy = lam1((x, y)), lam2((x, y))
            g2 = gx * gx + gy * gy
            if g2 <= 1e-300:
                break
            t = 1.0
            while t > 1e-4:
                cx, cy = x - t * r * gx / g2, y - t * r * gy / g2
                rc = lam((cx, cy))
                if abs(rc) <= abs(r):
                    x, y, r = cx, cy, rc
                    break
                t *= 0.5
            else:
                break
        sharpened[key] = (float(x), float(y))
        residuals[key] = abs(float(r))

    # Link segments into chains by walking edge adjacency.
    adj: dict[tuple, list[tuple]] = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    def chain_from(start, visited_pairs):
        chain = [start]
        prev = None
        node = start
        while True:
            nxt = None
            for nb in adj[node]:
                pair = frozenset((node, nb)) if node != nb else (node, nb)
                if pair in visited_pairs:
                    continue
                nxt = nb
                visited_pairs.add(pair)
                break
            if nxt is None:
                return chain, False
            chain.append(nxt)
            prev, node = node, nxt
            if node == start:
                chain.pop()
                return chain, True

    ordered_keys = sorted(adj, key=lambda k: (k[1], k[2], k[0]))
    visited_pairs: set = set()
    used: set = set()
    curves: list[CurveSample] = []
    # open chains start at odd-degree crossings
    for key in ordered_keys:
        if key in used or len(adj[key]) != 1:
            continue
        chain, closed = chain_from(key, visited_pairs)
        used.update(chain)
        curves.append(_build_curve(chain, closed, sharpened, residuals))
    for key in ordered_keys:
        if key in used:
            continue
        remaining = [
            nb
            for nb in adj[key]
            if frozenset((key, nb)) not in visited_pairs
        ]
        if not remaining:
            used.add(key)
            continue
        chain, closed = chain_from(key, visited_pairs)
        used.update(chain)
        curves.append(_build_curve(chain, closed, sharpened, residuals))
    return [c for c in curves if len(c.vertices) >= 2]


def _build_curve(chain, closed, sharpened, residuals) -> CurveSample:
    verts: list[tuple[float, float]] = []
    res: list[float] = []
    for key in chain:
        pt = sharpened[key]
        if verts and abs(pt[0] - verts[-1][0]) + abs(pt[1] - verts[-1][1]) < 1e-15:
            continue
        verts.append(pt)
        res.append(residuals[key])
    return CurveSample(vertices=verts, residuals=res, closed=bool(closed))


def _dedup(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for p in sorted(points):
        if all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 > DEDUP_RADIUS**2 for q in out):
            out.append(p)
    return out


def find_special_points(
    f: PlaneMapGerm,
    box: BoxDomain,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> list[SpecialPoint]:
    """Locate and classify candidate non-fold points inside the box.

    Two Newton systems seed from every grid cell center: grad lambda = 0
    (kept when the root also lies on the singular set) and
    (lambda, eta lambda) = 0.  Roots of the first system take priority
    when the two families overlap, since a degenerate point also
    solves the second system.  Results are deduplicated and sorted by
    location; each survivor is classified by re-basing the germ.
    """
    lam = f.discriminant_poly()
    lam1, lam2 = lam.partial(1), lam.partial(2)
    lam11, lam12 = lam1.partial(1), lam1.partial(2)
    lam22 = lam2.partial(2)

    # A search-wide null field: the base-point construction applied
    # globally.  For maps whose first component has a non-degenerate
    # gradient somewhere (all catalog forms), the first row serves; the
    # fallback mirrors the base-point rule.
    P, Q = f.components
    if not (P.partial(1).is_zero() and P.partial(2).is_zero()):
        eta1, eta2 = P.partial(2), -P.partial(1)
    else:
        eta1, eta2 = -Q.partial(2), Q.partial(1)
    eta_lam = eta1 * lam1 + eta2 * lam2
    el1, el2 = eta_lam.partial(1), eta_lam.partial(2)

    xs, ys = box.axes()
    U1, U2 = np.meshgrid(xs, ys, indexing="ij")
    scale = float(np.max(np.abs(lam.eval_grid(U1, U2))))
    lam_zero_bound = max(tol.zero_rel * scale, tol.newton_residual)

    seeds = [
        ((xs[i] + xs[i + 1]) / 2.0, (ys[j] + ys[j + 1]) / 2.0)
        for i in range(box.grid[0])
        for j in range(box.grid[1])
    ]

    def grad_system(x):
        return (lam1(x), lam2(x))

    def grad_jacobian(x):
        a, b, c = lam11(x), lam12(x), lam22(x)
        return ((a, b), (b, c))

    def cusp_system(x):
        return (lam(x), eta_lam(x))

    def cusp_jacobian(x):
        return ((lam1(x), lam2(x)), (el1(x), el2(x)))

    degenerate_roots: list[tuple[float, float]] = []
    degenerate_resid: dict[tuple[float, float], float] = {}
    for s in seeds:
        x, rnorm, ok = _newton2(grad_system, grad_jacobian, s, tol, box)
        if not ok or not box.contains(x):
            continue
        if abs(lam((x[0], x[1]))) > lam_zero_bound:
            continue
        pt = (float(x[0]), float(x[1]))
        degenerate_roots.append(pt)
        degenerate_resid[pt] = rnorm
    degenerate_roots = _dedup(degenerate_roots)

    cusp_roots: list[tuple[float, float]] = []
    cusp_resid: dict[tuple[float, float], float] = {}
    for s in seeds:
        x, rnorm, ok = _newton2(cusp_system, cusp_jacobian, s, tol, box)
        if not ok or not box.contains(x):
            continue
        pt = (float(x[0]), float(x[1]))
        cusp_roots.append(pt)
        cusp_resid[pt] = rnorm
    cusp_roots = [
        p
        for p in _dedup(cusp_roots)
        if all(
            (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 > DEDUP_RADIUS**2
            for q in degenerate_roots
        )
    ]

    out: list[SpecialPoint] = []
    for pt in degenerate_roots:
        report = classify(f.rebase(pt), tol)
        best = min(
            (r for p, r in degenerate_resid.items() if _close(p, pt)),
            default=degenerate_resid.get(pt, 0.0),
        )
        out.append(SpecialPoint(pt, "DegenerateCandidate", best, report))
    for pt in cusp_roots:
        report = classify(f.rebase(pt), tol)
        best = min(
            (r for p, r in cusp_resid.items() if _close(p, pt)),
            default=cusp_resid.get(pt, 0.0),
        )
        out.append(SpecialPoint(pt, "CuspCandidate", best, report))
    out.sort(key=lambda sp: (sp.location[0], sp.location[1], sp.kind))
    return out


def _close(p, q) -> bool:
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 <= DEDUP_RADIUS**2


def critical_value_image(f: PlaneMapGerm, curves: list[CurveSample]) -> list[CurveSample]:
    """Push traced source-plane curves through f into the target plane.

    Residuals and the closed flag carry over unchanged; they still
    describe the quality of the source-plane sample.
    """
    out = []
    for c in curves:
        out.append(
            CurveSample(
                vertices=[tuple(map(float, f.value_at(v))) for v in c.vertices],
                residuals=list(c.residuals),
                closed=c.closed,
            )
        )
    return out


def ruling_map(curve, t0: float = 0.0) -> PlaneMapGerm:
    """Tangent-line sweep of a parametrized polynomial plane curve.

    For gamma(t) = (a(t), b(t)) the sweep is R(t, w) = gamma(t) +
    w * gamma'(t), the map collecting all tangent lines.  Its
    discriminant is proportional to w times the curvature numerator
    a'b'' - a''b', so the sweep is singular exactly along the curve
    itself (w = 0) and degenerates further where the curve has an
    inflection.  The germ is taken at (t0, 0), which must be a regular
    curve point.
    """
    a, b = curve
    if not isinstance(a, Poly1):
        a = poly_from_spec(a)
    if not isinstance(b, Poly1):
        b = poly_from_spec(b)
    if not isinstance(a, Poly1) or not isinstance(b, Poly1):
        raise TypeError("ruling curve components must be one-variable polynomials")
    da, db = a.derivative(), b.derivative()
    speed = math.hypot(da(t0), db(t0))
    coeff_scale = max(a.max_abs_coeff(), b.max_abs_coeff(), 1.0)
    if speed <= 1e-9 * coeff_scale:
        raise NotRegularCurve(f"curve velocity vanishes at t0={t0}")

    t = Poly2.variable(1)
    w = Poly2.variable(2)

    def lift(p: Poly1) -> Poly2:
        return Poly2({(k, 0): c for k, c in p.coeffs.items()})

    comp1 = lift(a) + w * lift(da)
    comp2 = lift(b) + w * lift(db)
    return PlaneMapGerm((comp1, comp2), (float(t0), 0.0))
