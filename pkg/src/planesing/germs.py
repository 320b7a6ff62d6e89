"""Recognition of corank-one singular points of plane-to-plane maps.

A smooth map f = (P, Q) from the (u1, u2)-plane to the (x1, x2)-plane
is singular where its Jacobian determinant -- the discriminant
``lambda = P_u1 Q_u2 - P_u2 Q_u1`` -- vanishes.  At a corank-one
singular point p there is a null direction field eta along which df
annihilates tangent vectors, and the whole local classification of the
stable and codimension-one unstable singularities reads off finitely
many derivatives of lambda:

* fold            eta lambda (p) != 0
* cusp            d lambda (p) != 0, eta lambda = 0, eta eta lambda != 0
* swallowtail     d lambda (p) != 0, eta lambda = eta eta lambda = 0,
                  eta eta eta lambda != 0
* lips            d lambda (p) = 0, det Hess lambda (p) > 0
* beaks           d lambda (p) = 0, det Hess lambda (p) < 0,
                  eta eta lambda != 0

Everything that falls through the table is reported as Degenerate, and
any quantity whose magnitude lands in the no-man's-land between the
zero and nonzero thresholds makes the verdict Unrecognized rather than
a guess.  The decision trail (values, normalized magnitudes, and the
three-way call for each test) is recorded on the report so a verdict
can be re-derived from the report alone.

Maps are given by exact polynomial components, so every jet here is an
exact truncation; the tolerance policy exists for inputs that arrive
through rounded arithmetic (conjugation, Newton-located base points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jets import Jet2, compose_map, poly_to_jet
from .poly import Poly2, poly_from_spec

__all__ = [
    "ToleranceConfig",
    "PlaneMapGerm",
    "NullField",
    "ClassificationReport",
    "CorankTwoError",
    "NotADiffeomorphism",
    "IMMERSION",
    "FOLD",
    "CUSP",
    "LIPS",
    "BEAKS",
    "SWALLOWTAIL",
    "CORANK_TWO",
    "DEGENERATE",
    "UNRECOGNIZED",
    "discriminant",
    "rank_df",
    "null_field",
    "eta_derivatives",
    "classify",
    "conjugate_by_diffeos",
    "builtin_germ",
    "BUILTIN_GERMS",
]

# Class labels.  Definite classes get CLI exit code 0; the last two
# signal "outside the recognized set" / "tolerance could not decide".
IMMERSION = "Immersion"
FOLD = "Fold"
CUSP = "Cusp"
LIPS = "Lips"
BEAKS = "Beaks"
SWALLOWTAIL = "Swallowtail"
CORANK_TWO = "CorankTwo"
DEGENERATE = "Degenerate"
UNRECOGNIZED = "Unrecognized"

DEFINITE_CLASSES = frozenset({IMMERSION, FOLD, CUSP, LIPS, BEAKS, SWALLOWTAIL, CORANK_TWO})


class CorankTwoError(ValueError):
    """The Jacobian vanishes entirely at the point; no null field exists."""


class NotADiffeomorphism(ValueError):
    """A change of coordinates fails its base-point or invertibility check."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical policy for every zero test in the package.

    zero_rel:        |value| <= zero_rel * scale counts as zero, and
                     |value| >= 10 * zero_rel * scale counts as nonzero;
                     the band between is reported, not decided.
    rank_threshold:  singular-value ratio below which the Jacobian
                     loses a rank.
    newton_residual: absolute nonlinear-solver residual bound.
    newton_max_iter: iteration cap for all Newton loops.
    """

    zero_rel: float = 1e-7
    rank_threshold: float = 1e-8
    newton_residual: float = 1e-10
    newton_max_iter: int = 50

    def __post_init__(self):
        if not (self.zero_rel > 0 and self.rank_threshold > 0 and self.newton_residual > 0):
            raise ValueError("tolerances must be positive")
        if not (self.zero_rel < 1 and self.rank_threshold < 1):
            raise ValueError("relative tolerances must be below 1")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be at least 1")

    def as_dict(self) -> dict:
        return {
            "zero_rel": self.zero_rel,
            "rank_threshold": self.rank_threshold,
            "newton_residual": self.newton_residual,
            "newton_max_iter": self.newton_max_iter,
        }


DEFAULT_TOLERANCES = ToleranceConfig()

ZERO = "zero"
NONZERO = "nonzero"
UNCERTAIN = "uncertain"


def _decide(value: float, scale: float, zero_rel: float) -> tuple[str, float]:
    """Three-way zero test of ``value`` against ``zero_rel * scale``.

    Returns (decision, normalized magnitude).  A zero scale means the
    quantity is identically zero at the working order, so the value is
    zero by construction.
    """
    if scale <= 0.0:
        return ZERO, 0.0
    m = abs(value) / scale
    if m <= zero_rel:
        return ZERO, m
    if m >= 10.0 * zero_rel:
        return NONZERO, m
    return UNCERTAIN, m


class PlaneMapGerm:
    """A polynomial map of the plane, studied as a germ at a base point.

    Components are exact two-variable polynomials; the base point just
    marks where jets are taken.  Target constants are irrelevant to
    every derived quantity (they drop out of the Jacobian), so germs
    are not translated in the target.
    """

    __slots__ = ("components", "base_point", "_lam_poly")

    def __init__(self, components, base_point=(0.0, 0.0)):
        comp1, comp2 = components
        if not isinstance(comp1, Poly2):
            comp1 = poly_from_spec(comp1)
        if not isinstance(comp2, Poly2):
            comp2 = poly_from_spec(comp2)
        if not isinstance(comp1, Poly2) or not isinstance(comp2, Poly2):
            raise TypeError("germ components must be two-variable polynomials")
        self.components = (comp1, comp2)
        self.base_point = (float(base_point[0]), float(base_point[1]))
        self._lam_poly = None

    @classmethod
    def from_jets(cls, jet1: Jet2, jet2: Jet2) -> "PlaneMapGerm":
        """Promote a pair of jets at a common base to a polynomial germ."""
        if jet1.base_point != jet2.base_point:
            raise ValueError("component jets must share a base point")
        p = jet1.base_point
        polys = []
        for jet in (jet1, jet2):
            local = Poly2(
                {
                    (i, j): jet.coeffs[i, j]
                    for i in range(jet.order + 1)
                    for j in range(jet.order + 1 - i)
                    if jet.coeffs[i, j] != 0.0
                }
            )
            polys.append(local.shift((-p[0], -p[1])))
        return cls((polys[0], polys[1]), p)

    def rebase(self, new_base) -> "PlaneMapGerm":
        return PlaneMapGerm(self.components, new_base)

    def value_at(self, u=None):
        u = self.base_point if u is None else u
        return (self.components[0](u), self.components[1](u))

    def jacobian_at(self, u=None) -> np.ndarray:
        u = self.base_point if u is None else u
        P, Q = self.components
        return np.array(
            [
                [P.partial(1)(u), P.partial(2)(u)],
                [Q.partial(1)(u), Q.partial(2)(u)],
            ]
        )

    def component_jets(self, order: int = 4) -> tuple[Jet2, Jet2]:
        return (
            poly_to_jet(self.components[0], self.base_point, order),
            poly_to_jet(self.components[1], self.base_point, order),
        )

    def discriminant_poly(self) -> Poly2:
        """Jacobian determinant as an exact global polynomial (cached)."""
        if self._lam_poly is None:
            P, Q = self.components
            self._lam_poly = P.partial(1) * Q.partial(2) - P.partial(2) * Q.partial(1)
        return self._lam_poly

    def derivative_scale(self) -> float:
        """Magnitude scale of df: largest non-constant Taylor coefficient."""
        s = 0.0
        for comp in self.components:
            for (i, j), c in comp.coeffs.items():
                if i + j >= 1:
                    s = max(s, abs(c))
        return s

    def __repr__(self):
        return f"PlaneMapGerm({self.components[0]!r}, {self.components[1]!r}, base={self.base_point!r})"


@dataclass(frozen=True)
class NullField:
    """Vector field spanning ker(df) along the singular set near p.

    eta holds order-3 jets of the field components at the germ's base
    point; eta_polys the same field as exact global polynomials.  The
    field is built from one row of the Jacobian: with f = (P, Q),

        first-row   eta = ( P_u2, -P_u1),  df(eta) = (0, -lambda)
        second-row  eta = (-Q_u2,  Q_u1),  df(eta) = (-lambda, 0)

    so eta is a genuine null direction exactly on the singular set and
    extends it smoothly off the set.  Which row is usable depends on
    which gradient survives at p; provenance records the choice.
    """

    eta: tuple[Jet2, Jet2]
    provenance: str
    eta_polys: tuple[Poly2, Poly2]

    def values_at_base(self) -> tuple[float, float]:
        return (self.eta[0].value, self.eta[1].value)


def discriminant(f: PlaneMapGerm) -> Jet2:
    """Order-3 jet of the Jacobian determinant at the germ's base point."""
    return poly_to_jet(f.discriminant_poly(), f.base_point, 3)


def rank_df(f: PlaneMapGerm, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """Numerical rank of df at the base point via singular values."""
    J = f.jacobian_at()
    s = np.linalg.svd(J, compute_uv=False)
    scale = f.derivative_scale()
    if s[0] <= tol.rank_threshold * max(scale, 0.0) or s[0] == 0.0:
        return 0
    if s[1] <= tol.rank_threshold * s[0]:
        return 1
    return 2


def null_field(f: PlaneMapGerm, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> NullField:
    """Canonical null direction field of a corank-one germ.

    Prefers the first-row construction; falls back to the second row
    when grad P vanishes at the base point.  Raises CorankTwoError if
    both rows vanish there (the Jacobian is zero and no single row
    determines a kernel direction).
    """
    P, Q = f.components
    p = f.base_point
    Pu, Pv = P.partial(1), P.partial(2)
    Qu, Qv = Q.partial(1), Q.partial(2)
    scale = f.derivative_scale()
    thresh = tol.rank_threshold * max(scale, 1e-300)
    if max(abs(Pu(p)), abs(Pv(p))) > thresh:
        polys = (Pv, -Pu)
        provenance = "first-row"
    elif max(abs(Qu(p)), abs(Qv(p))) > thresh:
        polys = (-Qv, Qu)
        provenance = "second-row"
    else:
        raise CorankTwoError(f"Jacobian vanishes at {p}; null direction undefined")
    jets = (poly_to_jet(polys[0], p, 3), poly_to_jet(polys[1], p, 3))
    return NullField(eta=jets, provenance=provenance, eta_polys=polys)


def _directional_jet(g: Jet2, field: tuple[Jet2, Jet2]) -> Jet2:
    """Jet of the derivative of g along the field: eta1 g_u1 + eta2 g_u2."""
    m = g.order - 1
    return field[0].truncate(m) * g.partial(1) + field[1].truncate(m) * g.partial(2)


def _eta_derivative_jets(lam: Jet2, eta: tuple[Jet2, Jet2]) -> list[Jet2]:
    """Jets of the first three iterated eta-derivatives of lambda.

    Starting from an order-n jet of lambda, the k-th iterate is an
    order n-k jet; its value at the base point is exact whenever the
    inputs are exact truncations, because forming the value of an
    iterated first-order derivative only consumes coefficients the
    truncations retained.
    """
    out = []
    g = lam
    for _ in range(3):
        g = _directional_jet(g, eta)
        out.append(g)
    return out


def eta_derivatives(lam: Jet2, eta: tuple[Jet2, Jet2]) -> tuple[float, float, float]:
    """Values at the base point of eta lambda, eta^2 lambda, eta^3 lambda.

    Requires lam to carry at least three orders (each application of
    the field costs one).
    """
    jets = _eta_derivative_jets(lam, eta)
    return (jets[0].value, jets[1].value, jets[2].value)


@dataclass
class ClassificationReport:
    """Full decision trail for one germ at one point.

    margins maps each tested quantity to its raw value, its magnitude
    normalized by the quantity's scale, and the three-way decision the
    tolerance policy produced.  A report with class Unrecognized always
    has at least one 'uncertain' entry.
    """

    singularity_class: str
    base_point: tuple[float, float]
    rank: int
    lambda_jet: Jet2
    d_lambda: tuple[float, float]
    hess_lambda: tuple[tuple[float, float], tuple[float, float]]
    det_hess_lambda: float
    eta_at_p: tuple[float, float] | None
    eta_provenance: str | None
    eta_lambda: float | None
    eta2_lambda: float | None
    eta3_lambda: float | None
    margins: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    note: str = ""

    @property
    def is_definite(self) -> bool:
        return self.singularity_class in DEFINITE_CLASSES

    @property
    def lambda_value(self) -> float:
        return self.lambda_jet.value

    def to_dict(self) -> dict:
        return {
            "class": self.singularity_class,
            "base_point": list(self.base_point),
            "rank_df": self.rank,
            "lambda_jet": {
                "base_point": list(self.lambda_jet.base_point),
                "order": self.lambda_jet.order,
                "coeffs": [list(row) for row in self.lambda_jet.coeffs],
            },
            "d_lambda": list(self.d_lambda),
            "hess_lambda": [list(r) for r in self.hess_lambda],
            "det_hess": self.det_hess_lambda,
            "eta_at_p": None if self.eta_at_p is None else list(self.eta_at_p),
            "eta_provenance": self.eta_provenance,
            "eta_lambda": self.eta_lambda,
            "eta2_lambda": self.eta2_lambda,
            "eta3_lambda": self.eta3_lambda,
            "margins": self.margins,
            "tolerances_used": self.tolerances,
            "note": self.note,
        }


def _margin(value: float, scale: float, zero_rel: float) -> tuple[str, dict]:
    decision, m = _decide(value, scale, zero_rel)
    return decision, {"value": value, "normalized": m, "decision": decision}


def classify(f: PlaneMapGerm, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> ClassificationReport:
    """Classify the germ of f at its base point.

    Walks the recognition tree in order fold, cusp, swallowtail, lips,
    beaks; everything the table does not cover is Degenerate, and any
    test whose magnitude falls between the zero and nonzero thresholds
    stops the walk with Unrecognized.  All tested quantities and their
    margins are recorded regardless of the verdict.
    """
    rank = rank_df(f, tol)
    lam = discriminant(f)
    scale_lam = lam.max_abs_coeff()

    # A deeper jet of the same discriminant feeds the derived
    # quantities, so each of them still carries a populated jet of its
    # own whose coefficient scale is the right yardstick for its value.
    lam_deep = poly_to_jet(f.discriminant_poly(), f.base_point, 6)
    h11 = lam_deep.partial(1).partial(1)
    h12 = lam_deep.partial(1).partial(2)
    h22 = lam_deep.partial(2).partial(2)
    det_hess_jet = h11 * h22 - h12 * h12

    lam0 = lam.value
    d_lam = (lam.deriv(1, 0), lam.deriv(0, 1))
    hess = (
        (lam.deriv(2, 0), lam.deriv(1, 1)),
        (lam.deriv(1, 1), lam.deriv(0, 2)),
    )
    det_hess = det_hess_jet.value

    zr = tol.zero_rel
    margins: dict[str, dict] = {}
    dec_lam, margins["lambda"] = _margin(lam0, scale_lam, zr)
    dec_dlam, margins["d_lambda"] = _margin(max(abs(d_lam[0]), abs(d_lam[1])), scale_lam, zr)
    dec_hess, margins["det_hess_lambda"] = _margin(det_hess, det_hess_jet.max_abs_coeff(), zr)

    report = ClassificationReport(
        singularity_class=UNRECOGNIZED,
        base_point=f.base_point,
        rank=rank,
        lambda_jet=lam,
        d_lambda=d_lam,
        hess_lambda=hess,
        det_hess_lambda=det_hess,
        eta_at_p=None,
        eta_provenance=None,
        eta_lambda=None,
        eta2_lambda=None,
        eta3_lambda=None,
        margins=margins,
        tolerances=tol.as_dict(),
    )

    if rank == 2:
        report.singularity_class = IMMERSION
        report.note = "Jacobian has full rank at the base point"
        return report
    if rank == 0:
        report.singularity_class = CORANK_TWO
        report.note = "Jacobian vanishes at the base point; outside corank-one scope"
        return report

    if dec_lam == NONZERO:
        # Numerically rank-deficient Jacobian but a solidly nonzero
        # determinant: the point is regular at the working tolerance.
        report.singularity_class = IMMERSION
        report.note = "discriminant is nonzero at the base point"
        return report
    if dec_lam == UNCERTAIN:
        report.note = "discriminant value sits between the zero and nonzero thresholds"
        return report

    nf = null_field(f, tol)
    eta_deep = (
        poly_to_jet(nf.eta_polys[0], f.base_point, 5),
        poly_to_jet(nf.eta_polys[1], f.base_point, 5),
    )
    d1, d2, d3 = _eta_derivative_jets(lam_deep, eta_deep)
    report.eta_at_p = nf.values_at_base()
    report.eta_provenance = nf.provenance
    report.eta_lambda = d1.value
    report.eta2_lambda = d2.value
    report.eta3_lambda = d3.value

    # Each iterated derivative is judged against the coefficient scale
    # of its own jet.  The tested value is that jet's constant term, so
    # this asks whether the value stands out from the local behavior of
    # the same quantity; products of input scales overshoot badly after
    # coordinate changes and would drown genuinely nonzero invariants.
    dec_e1, margins["eta_lambda"] = _margin(d1.value, d1.max_abs_coeff(), zr)
    dec_e2, margins["eta2_lambda"] = _margin(d2.value, d2.max_abs_coeff(), zr)
    dec_e3, margins["eta3_lambda"] = _margin(d3.value, d3.max_abs_coeff(), zr)

    if dec_e1 == NONZERO:
        report.singularity_class = FOLD
        return report
    if dec_e1 == UNCERTAIN:
        report.note = "eta lambda sits between the zero and nonzero thresholds"
        return report

    if dec_dlam == NONZERO:
        # Non-degenerate singular point with a tangent null direction.
        if dec_e2 == NONZERO:
            report.singularity_class = CUSP
            return report
        if dec_e2 == UNCERTAIN:
            report.note = "eta^2 lambda sits between the zero and nonzero thresholds"
            return report
        if dec_e3 == NONZERO:
            report.singularity_class = SWALLOWTAIL
            return report
        if dec_e3 == UNCERTAIN:
            report.note = "eta^3 lambda sits between the zero and nonzero thresholds"
            return report
        report.singularity_class = DEGENERATE
        report.note = "null-direction derivatives of the discriminant vanish through order three"
        return report

    if dec_dlam == UNCERTAIN:
        report.note = "d lambda sits between the zero and nonzero thresholds"
        return report

    # Degenerate singular point: the discriminant has a critical point.
    if dec_hess == NONZERO and det_hess > 0.0:
        report.singularity_class = LIPS
        return report
    if dec_hess == NONZERO and det_hess < 0.0:
        if dec_e2 == NONZERO:
            report.singularity_class = BEAKS
            return report
        if dec_e2 == UNCERTAIN:
            report.note = "eta^2 lambda sits between the zero and nonzero thresholds"
            return report
        report.singularity_class = DEGENERATE
        report.note = "indefinite discriminant Hessian but eta^2 lambda vanishes"
        return report
    if dec_hess == ZERO:
        report.singularity_class = DEGENERATE
        report.note = "discriminant Hessian is singular at a critical point"
        return report
    report.note = "det Hess lambda sits between the zero and nonzero thresholds"
    return report


def _linear_part(p1: Poly2, p2: Poly2) -> np.ndarray:
    return np.array(
        [
            [p1.coeffs.get((1, 0), 0.0), p1.coeffs.get((0, 1), 0.0)],
            [p2.coeffs.get((1, 0), 0.0), p2.coeffs.get((0, 1), 0.0)],
        ]
    )


def conjugate_by_diffeos(
    f: PlaneMapGerm,
    source,
    target,
    order: int = 4,
) -> PlaneMapGerm:
    """The germ target o f o source, truncated at the given jet order.

    source is a polynomial map fixing the germ's base point; target is
    one fixing the origin of the translated target plane (the germ's
    value is subtracted before target applies, so classification data
    is unaffected).  Both must have invertible linear parts at their
    base points.  Order 4 retains everything the recognition tree
    reads, since every tested quantity lives in the 3-jet of the
    discriminant.
    """
    p = f.base_point
    s1, s2 = (c if isinstance(c, Poly2) else poly_from_spec(c) for c in source)
    t1, t2 = (c if isinstance(c, Poly2) else poly_from_spec(c) for c in target)

    sv = (s1(p), s2(p))
    if math.hypot(sv[0] - p[0], sv[1] - p[1]) > 1e-9 * (1.0 + math.hypot(*p)):
        raise NotADiffeomorphism(f"source map sends base point {p} to {sv}")
    tv = (t1((0.0, 0.0)), t2((0.0, 0.0)))
    if math.hypot(*tv) > 1e-9:
        raise NotADiffeomorphism(f"target map sends the origin to {tv}")

    Ls = np.array(
        [
            [s1.partial(1)(p), s1.partial(2)(p)],
            [s2.partial(1)(p), s2.partial(2)(p)],
        ]
    )
    Lt = _linear_part(t1, t2)
    for name, L in (("source", Ls), ("target", Lt)):
        if abs(np.linalg.det(L)) <= 1e-8 * max(1.0, np.max(np.abs(L)) ** 2):
            raise NotADiffeomorphism(f"{name} map has a singular linear part")

    s_jets = (poly_to_jet(s1, p, order), poly_to_jet(s2, p, order))
    fv = f.value_at()
    mid = []
    for comp, const in zip(f.components, fv):
        outer = poly_to_jet(comp, p, order)
        composed = compose_map(outer, s_jets[0], s_jets[1])
        mid.append(composed - const)
    t_jets = (poly_to_jet(t1, (0.0, 0.0), order), poly_to_jet(t2, (0.0, 0.0), order))
    g1 = compose_map(t_jets[0], mid[0], mid[1])
    g2 = compose_map(t_jets[1], mid[0], mid[1])
    return PlaneMapGerm.from_jets(g1, g2)


def _u() -> Poly2:
    return Poly2.variable(1)


def _v() -> Poly2:
    return Poly2.variable(2)


def builtin_germ(name: str) -> PlaneMapGerm:
    """Normal forms of the recognized classes, as germs at the origin."""
    u, v = _u(), _v()
    table = {
        "immersion": (u, v),
        "fold": (u, v * v),
        "cusp": (u, v * v * v + u * v),
        "lips": (u, v * v * v + u * u * v),
        "beaks": (u, v * v * v - u * u * v),
        "swallowtail": (u, u * v + v * v * v * v),
    }
    try:
        comps = table[name]
    except KeyError:
        raise KeyError(
            f"unknown builtin germ {name!r}; choose from {sorted(table)}"
        ) from None
    return PlaneMapGerm(comps, (0.0, 0.0))


BUILTIN_GERMS = ("immersion", "fold", "cusp", "lips", "beaks", "swallowtail")
