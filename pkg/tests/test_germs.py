"""Recognition of the normal-form catalog and its coordinate invariance."""

import numpy as np
import pytest

from planesing.germs import (
    BEAKS,
    BUILTIN_GERMS,
    CUSP,
    DEGENERATE,
    FOLD,
    IMMERSION,
    LIPS,
    SWALLOWTAIL,
    UNRECOGNIZED,
    CorankTwoError,
    NotADiffeomorphism,
    PlaneMapGerm,
    ToleranceConfig,
    builtin_germ,
    classify,
    conjugate_by_diffeos,
    discriminant,
    eta_derivatives,
    null_field,
    rank_df,
)
from planesing.jets import poly_to_jet
from planesing.poly import Poly2

CATALOG = {
    "immersion": IMMERSION,
    "fold": FOLD,
    "cusp": CUSP,
    "lips": LIPS,
    "beaks": BEAKS,
    "swallowtail": SWALLOWTAIL,
}


@pytest.mark.parametrize("name,expected", sorted(CATALOG.items()))
def test_normal_form_catalog(name, expected):
    report = classify(builtin_germ(name))
    assert report.singularity_class == expected


def test_builtin_names_are_stable():
    assert set(BUILTIN_GERMS) == set(CATALOG)


def test_discriminant_of_lips_form():
    lam = discriminant(builtin_germ("lips"))
    assert lam.coeffs[0, 2] == pytest.approx(3.0)
    assert lam.coeffs[2, 0] == pytest.approx(1.0)
    assert lam.value == 0.0


def test_discriminant_of_swallowtail_form():
    lam = discriminant(builtin_germ("swallowtail"))
    assert lam.coeffs[1, 0] == pytest.approx(1.0)
    assert lam.coeffs[0, 3] == pytest.approx(4.0)


def test_discriminant_of_identity():
    g = PlaneMapGerm((Poly2.variable(1), Poly2.variable(2)), (0.0, 0.0))
    lam = discriminant(g)
    assert lam.value == pytest.approx(1.0)


def test_rank_examples():
    ident = PlaneMapGerm((Poly2.variable(1), Poly2.variable(2)), (0.0, 0.0))
    assert rank_df(ident) == 2
    assert rank_df(builtin_germ("fold")) == 1
    squares = PlaneMapGerm(
        (Poly2({(2, 0): 1.0}), Poly2({(0, 2): 1.0})), (0.0, 0.0)
    )
    assert rank_df(squares) == 0


def test_null_field_on_lips_and_beaks():
    for name in ("lips", "beaks"):
        nf = null_field(builtin_germ(name))
        assert nf.provenance == "first-row"
        v = nf.values_at_base()
        assert v[0] == 0.0 and abs(v[1]) == 1.0


def test_null_field_second_row_fallback():
    # first component v^2 has vanishing gradient at 0, second is v
    g = PlaneMapGerm((Poly2({(0, 2): 1.0}), Poly2({(0, 1): 1.0})), (0.0, 0.0))
    nf = null_field(g)
    assert nf.provenance == "second-row"
    assert nf.values_at_base() == pytest.approx((-1.0, 0.0))


def test_null_field_kernel_orthogonal_to_gradient_row():
    # f = (v, u): grad P = (0, 1), so eta(p) = (1, 0)
    g = PlaneMapGerm((Poly2.variable(2), Poly2.variable(1)), (0.0, 0.0))
    assert null_field(g).values_at_base() == pytest.approx((1.0, 0.0))


def test_null_field_corank_two_rejected():
    squares = PlaneMapGerm(
        (Poly2({(2, 0): 1.0}), Poly2({(0, 2): 1.0})), (0.0, 0.0)
    )
    with pytest.raises(CorankTwoError):
        null_field(squares)


@pytest.mark.parametrize("name", sorted(set(CATALOG) - {"immersion"}))
def test_df_eta_is_discriminant_column(name):
    # df(eta) must equal (0, -lambda) or (-lambda, 0) identically as jets
    g = builtin_germ(name)
    nf = null_field(g)
    lam = discriminant(g)
    jac = g.component_jets(order=4)
    rows = [
        jac[0].partial(1) * nf.eta[0] + jac[0].partial(2) * nf.eta[1],
        jac[1].partial(1) * nf.eta[0] + jac[1].partial(2) * nf.eta[1],
    ]
    if nf.provenance == "first-row":
        zero_row, lam_row = rows
    else:
        lam_row, zero_row = rows
    scale = max(lam.max_abs_coeff(), 1.0)
    assert zero_row.max_abs_coeff() <= 1e-10 * scale
    assert np.allclose(lam_row.coeffs, -lam.coeffs, rtol=0, atol=1e-10 * scale)


def test_eta_derivative_chain_swallowtail_direction():
    # lambda = 4v^3 + u with field (0, 1): derivatives (0, 0, 24)
    lam = poly_to_jet(Poly2({(0, 3): 4.0, (1, 0): 1.0}), (0.0, 0.0), 3)
    eta = (
        poly_to_jet(Poly2.constant(0.0), (0.0, 0.0), 3),
        poly_to_jet(Poly2.constant(1.0), (0.0, 0.0), 3),
    )
    assert eta_derivatives(lam, eta) == pytest.approx((0.0, 0.0, 24.0))


def test_eta_derivative_chain_beaks_direction():
    lam = poly_to_jet(Poly2({(0, 2): 3.0, (2, 0): -1.0}), (0.0, 0.0), 3)
    eta = (
        poly_to_jet(Poly2.constant(0.0), (0.0, 0.0), 3),
        poly_to_jet(Poly2.constant(1.0), (0.0, 0.0), 3),
    )
    assert eta_derivatives(lam, eta) == pytest.approx((0.0, 6.0, 0.0))


def test_report_records_decision_trail():
    report = classify(builtin_germ("cusp"))
    assert report.rank == 1
    assert report.d_lambda == pytest.approx((1.0, 0.0))
    assert report.eta_lambda == pytest.approx(0.0)
    assert abs(report.eta2_lambda) == pytest.approx(6.0)
    assert report.margins["eta2_lambda"]["decision"] == "nonzero"
    d = report.to_dict()
    assert d["class"] == CUSP
    assert d["rank_df"] == 1
    assert set(d["margins"]) >= {"lambda", "d_lambda", "eta_lambda"}


def test_margins_clear_threshold_on_catalog():
    # every decision the tree used must sit well away from the gray zone
    tol = ToleranceConfig()
    for name in CATALOG:
        report = classify(builtin_germ(name))
        for entry in report.margins.values():
            if entry["decision"] == "nonzero":
                assert entry["normalized"] >= 10 * tol.zero_rel
            elif entry["decision"] == "zero":
                assert entry["normalized"] <= tol.zero_rel


def test_lips_implies_solid_eta2():
    report = classify(builtin_germ("lips"))
    assert report.singularity_class == LIPS
    assert abs(report.eta2_lambda) > 0.0
    assert report.margins["eta2_lambda"]["decision"] == "nonzero"


def test_swapped_source_coordinates_preserve_class():
    swaps = {
        "fold": (Poly2.variable(2), Poly2({(2, 0): 1.0})),
        "cusp": (Poly2.variable(2), Poly2({(3, 0): 1.0, (1, 1): 1.0})),
        "lips": (Poly2.variable(2), Poly2({(3, 0): 1.0, (1, 2): 1.0})),
        "beaks": (Poly2.variable(2), Poly2({(3, 0): 1.0, (1, 2): -1.0})),
        "swallowtail": (Poly2.variable(2), Poly2({(1, 1): 1.0, (4, 0): 1.0})),
    }
    for name, comps in swaps.items():
        g = PlaneMapGerm(comps, (0.0, 0.0))
        assert classify(g).singularity_class == CATALOG[name], name


def test_off_catalog_germs_stay_degenerate():
    trio = [
        Poly2({(0, 3): 1.0, (3, 1): 1.0}),          # v^3 + u^3 v
        Poly2({(1, 1): 1.0, (0, 5): 1.0, (0, 7): 1.0}),  # uv + v^5 + v^7
        Poly2({(1, 2): 1.0, (0, 4): 1.0, (0, 5): 1.0}),  # uv^2 + v^4 + v^5
    ]
    for q in trio:
        g = PlaneMapGerm((Poly2.variable(1), q), (0.0, 0.0))
        cls = classify(g).singularity_class
        assert cls in (DEGENERATE, UNRECOGNIZED)


def test_regular_point_reports_immersion_with_note():
    g = builtin_germ("fold").rebase((0.0, 0.5))  # off the fold line
    report = classify(g)
    assert report.singularity_class == IMMERSION
    assert report.note


def test_identity_conjugation_is_noop():
    ident = (Poly2.variable(1), Poly2.variable(2))
    g = builtin_germ("lips")
    h = conjugate_by_diffeos(g, ident, ident)
    assert classify(h).singularity_class == LIPS


def test_rotation_conjugation_of_fold():
    c, s = np.cos(0.7), np.sin(0.7)
    rot = (
        Poly2({(1, 0): c, (0, 1): -s}),
        Poly2({(1, 0): s, (0, 1): c}),
    )
    ident = (Poly2.variable(1), Poly2.variable(2))
    h = conjugate_by_diffeos(builtin_germ("fold"), rot, ident)
    assert classify(h).singularity_class == FOLD


def random_origin_diffeo(rng):
    """Degree-3 polynomial map fixing 0, det of linear part in [0.5, 2]."""
    while True:
        L = rng.uniform(-1.0, 1.0, (2, 2))
        if 0.5 <= np.linalg.det(L) <= 2.0:
            break
    comps = []
    for row in range(2):
        terms = {(1, 0): L[row, 0], (0, 1): L[row, 1]}
        for i in range(4):
            for j in range(4 - i):
                if i + j >= 2:
                    terms[(i, j)] = rng.uniform(-0.5, 0.5)
        comps.append(Poly2(terms))
    return (comps[0], comps[1])


def test_random_conjugation_suite(rng):
    # a slice of the full invariance run (the acceptance test does 200)
    for _ in range(20):
        src = random_origin_diffeo(rng)
        tgt = random_origin_diffeo(rng)
        for name, expected in CATALOG.items():
            h = conjugate_by_diffeos(builtin_germ(name), src, tgt)
            assert classify(h).singularity_class == expected, name


def test_degenerate_linear_part_rejected():
    bad = (
        Poly2({(1, 0): 1.0, (0, 1): 1.0}),
        Poly2({(1, 0): 1.0, (0, 1): 1.0}),
    )
    ident = (Poly2.variable(1), Poly2.variable(2))
    with pytest.raises(NotADiffeomorphism):
        conjugate_by_diffeos(builtin_germ("fold"), bad, ident)


def test_source_diffeo_must_fix_base_point():
    shift = (
        Poly2({(1, 0): 1.0, (0, 0): 0.3}),
        Poly2({(0, 1): 1.0}),
    )
    ident = (Poly2.variable(1), Poly2.variable(2))
    with pytest.raises(NotADiffeomorphism):
        conjugate_by_diffeos(builtin_germ("fold"), shift, ident)


def test_classification_is_translation_invariant():
    # same local behavior at a nonzero base point, nonzero target value
    comps = (
        Poly2.variable(1),
        Poly2({(0, 2): 1.0}),  # (u, v^2) singular along v=0 only
    )
    g = PlaneMapGerm(comps, (1.3, 0.0))
    report = classify(g)
    assert report.singularity_class == FOLD
    assert report.base_point == pytest.approx((1.3, 0.0))


def test_tolerance_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(zero_rel=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(zero_rel=2.0)
    with pytest.raises(ValueError):
        ToleranceConfig(newton_max_iter=0)


def test_gray_zone_reports_unrecognized():
    # eta-lambda normalizes to ~1.7e-7, strictly between zero_rel (1e-7)
    # and the 10x nonzero bar: the tree must refuse to guess
    g = PlaneMapGerm(
        (Poly2.variable(1), Poly2({(0, 2): 5e-7, (0, 3): 1.0})),
        (0.0, 0.0),
    )
    report = classify(g)
    assert report.singularity_class == UNRECOGNIZED
    assert report.margins["eta_lambda"]["decision"] == "uncertain"
    assert report.note
