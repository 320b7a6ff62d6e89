"""Characteristic maps, shape operator identities, and first-shock search."""

import numpy as np
import pytest

from planesing.conslaw import (
    ConsLawProblem,
    SolverFailed,
    builtin_problem,
    characteristic_map,
    first_singularity,
    lips_birth_frames,
    shape_operator,
    singular_time_field,
    singularity_at,
    xi_autodiff,
    xi_closed_form,
)
from planesing.germs import BEAKS, IMMERSION, LIPS, classify, discriminant, rank_df
from planesing.locus import BoxDomain
from planesing.poly import Poly1, Poly2

BURGERS_F1 = Poly1({2: 0.5})
ZERO_FLUX = Poly1({})
PHI_LIPS = Poly2({(1, 0): -1.0, (3, 0): 1.0, (1, 2): 1.0})
PHI_SADDLE = Poly2({(1, 0): -1.0, (3, 0): 1.0, (1, 2): -1.0})
SMALL_BOX = BoxDomain((-0.4, -0.4), (0.4, 0.4))


def model_problem():
    return ConsLawProblem(BURGERS_F1, ZERO_FLUX, PHI_LIPS)


def random_problem(rng):
    f1 = Poly1({k: rng.uniform(-1, 1) for k in range(6)})
    f2 = Poly1({k: rng.uniform(-1, 1) for k in range(6)})
    phi = Poly2({(i, j): rng.uniform(-1, 1) for i in range(5) for j in range(5 - i)})
    return ConsLawProblem(f1, f2, phi)


def test_time_zero_map_is_identity():
    g = characteristic_map(model_problem(), 0.0, (0.3, -0.2))
    assert classify(g).singularity_class == IMMERSION
    assert g.value_at((0.3, -0.2)) == pytest.approx((0.3, -0.2))


def test_characteristic_map_jacobian_at_onset():
    g = characteristic_map(model_problem(), 1.0, (0.0, 0.0))
    J = np.asarray(g.jacobian_at((0.0, 0.0)))
    assert J == pytest.approx(np.diag([0.0, 1.0]), abs=1e-14)


def test_shape_operator_model_values():
    C = shape_operator(model_problem(), (0.0, 0.0))
    assert np.asarray(C.entries) == pytest.approx(np.array([[-1.0, 0.0], [0.0, 0.0]]))
    assert C.trace == pytest.approx(-1.0)


def test_shape_operator_zero_cases():
    flat = ConsLawProblem(BURGERS_F1, ZERO_FLUX, Poly2.constant(3.0))
    assert np.allclose(shape_operator(flat, (0.1, 0.2)).entries, 0.0)
    linear_flux = ConsLawProblem(Poly1({1: 2.0}), Poly1({1: -1.0}), PHI_LIPS)
    assert np.allclose(shape_operator(linear_flux, (0.1, 0.2)).entries, 0.0)


def test_shape_operator_rank_one(rng):
    for _ in range(30):
        prob = random_problem(rng)
        u = tuple(rng.uniform(-0.8, 0.8, 2))
        C = np.asarray(shape_operator(prob, u).entries)
        scale = max(np.max(np.abs(C)) ** 2, 1e-300)
        assert abs(np.linalg.det(C)) <= 1e-10 * scale


def test_rank_one_determinant_identity(rng):
    # the rank-one defect of the stored entries is O(eps * |C|^2), so
    # the comparison scale for det(I + tC) is the squared matrix norm
    for _ in range(20):
        prob = random_problem(rng)
        u = tuple(rng.uniform(-0.8, 0.8, 2))
        C = shape_operator(prob, u)
        m = np.asarray(C.entries)
        for t in (0.1, 1.0, 10.0):
            a = np.eye(2) + t * m
            lhs = float(np.linalg.det(a))
            rhs = 1.0 + t * C.trace
            scale = max(1.0, float(np.max(np.abs(a))) ** 2)
            assert abs(lhs - rhs) <= 1e-12 * scale


def test_discriminant_consistency(rng):
    # the polynomial route rounds at the scale of the expanded lambda
    # coefficients, which is where its agreement should be measured
    for _ in range(20):
        prob = random_problem(rng)
        u = tuple(rng.uniform(-0.8, 0.8, 2))
        C = shape_operator(prob, u)
        for t in (0.1, 1.0, 10.0):
            germ = characteristic_map(prob, t, u)
            lam = discriminant(germ)
            expected = 1.0 + t * C.trace
            scale = max(1.0, germ.discriminant_poly().max_abs_coeff())
            assert abs(lam.value - expected) <= 1e-10 * scale


def test_singularity_onset_matches_rank(rng):
    # g_t drops rank exactly where 1 + t*trace hits zero
    for _ in range(10):
        prob = random_problem(rng)
        u = tuple(rng.uniform(-0.5, 0.5, 2))
        tr = shape_operator(prob, u).trace
        if abs(tr) < 1e-3:
            continue
        t_onset = -1.0 / tr
        if t_onset <= 0:
            continue
        g = characteristic_map(prob, t_onset, u)
        assert rank_df(g) <= 1
        g_half = characteristic_map(prob, 0.5 * t_onset, u)
        assert rank_df(g_half) == 2


def test_singular_time_field_values():
    prob = model_problem()
    assert singular_time_field(prob, (0.0, 0.0)) == pytest.approx(1.0)
    # trace = -1 + 3u1^2 + u2^2 = -2 has no solution; build one directly
    doubled = ConsLawProblem(Poly1({2: 1.0}), ZERO_FLUX, PHI_LIPS)
    assert singular_time_field(doubled, (0.0, 0.0)) == pytest.approx(0.5)


def test_singular_time_field_none_when_expanding():
    prob = builtin_problem("burgers-rarefaction")
    for u in [(-0.5, 0.0), (0.0, 0.0), (0.3, 0.4)]:
        assert singular_time_field(prob, u) is None


def test_xi_closed_form_model_point():
    xi = xi_closed_form(model_problem(), (0.0, 0.0))
    assert xi[0] == pytest.approx(0.0, abs=1e-14)
    assert xi[1] == pytest.approx(0.0, abs=1e-14)
    assert xi[2] == pytest.approx(12.0, rel=1e-12)


def test_xi_all_quadratic_collapses():
    prob = ConsLawProblem(
        Poly1({2: 0.7, 1: 0.3}),
        Poly1({2: -0.2}),
        Poly2({(2, 0): 0.5, (1, 1): -1.0, (0, 2): 0.25, (1, 0): 1.0}),
    )
    xi = xi_closed_form(prob, (0.3, -0.7))
    assert xi[2] == pytest.approx(0.0, abs=1e-12)


def test_xi_no_dependence_on_second_axis():
    prob = ConsLawProblem(
        Poly1({3: 1.0, 2: 0.5}),
        ZERO_FLUX,
        Poly2({(3, 0): 1.0, (1, 0): -1.0}),
    )
    for u in [(0.0, 0.0), (0.2, 0.5), (-0.3, -0.9)]:
        xi = xi_closed_form(prob, u)
        assert xi[1] == pytest.approx(0.0, abs=1e-13)
        assert xi[2] == pytest.approx(0.0, abs=1e-12)


def test_xi_oracles_agree(rng):
    # a slice of the acceptance corpus
    for _ in range(20):
        prob = random_problem(rng)
        for _ in range(5):
            u = tuple(rng.uniform(-0.9, 0.9, 2))
            a = xi_closed_form(prob, u)
            b = xi_autodiff(prob, u)
            for x, y in zip(a, b):
                assert abs(x - y) <= 1e-9 * max(abs(x), abs(y), 1e-3)


def test_xi_linear_profile_drops_hessian_terms(rng):
    # with phi linear the closed form keeps only third-derivative flux terms
    for _ in range(10):
        f1 = Poly1({k: rng.uniform(-1, 1) for k in range(6)})
        f2 = Poly1({k: rng.uniform(-1, 1) for k in range(6)})
        p1, p2 = rng.uniform(-1, 1, 2)
        phi = Poly2({(1, 0): p1, (0, 1): p2})
        prob = ConsLawProblem(f1, f2, phi)
        u = tuple(rng.uniform(-0.5, 0.5, 2))
        y = phi(u)
        d3f1 = f1.derivative(3)(y)
        d3f2 = f2.derivative(3)(y)
        xi = xi_closed_form(prob, u)
        assert xi[0] == pytest.approx(-(d3f1 * p1 * p1 + d3f2 * p1 * p2), rel=1e-10, abs=1e-12)
        assert xi[1] == pytest.approx(-(d3f1 * p1 * p2 + d3f2 * p2 * p2), rel=1e-10, abs=1e-12)


def test_first_singularity_model_problem():
    res = first_singularity(model_problem(), SMALL_BOX)
    assert res is not None
    assert res.t_star == pytest.approx(1.0, abs=1e-10)
    assert res.u_star == pytest.approx((0.0, 0.0), abs=1e-10)
    assert res.xi[2] == pytest.approx(12.0, abs=1e-8)
    assert res.report.singularity_class == LIPS
    assert not res.xi3_degenerate
    assert res.co_minimizers == []


def test_first_singularity_rarefaction_returns_none():
    prob = builtin_problem("burgers-rarefaction")
    assert first_singularity(prob, SMALL_BOX) is None


def test_saddle_box_search_fails_honestly():
    prob = ConsLawProblem(BURGERS_F1, ZERO_FLUX, PHI_SADDLE)
    with pytest.raises(SolverFailed) as info:
        first_singularity(prob, SMALL_BOX)
    err = info.value
    assert err.best_point is not None
    # the infimum over this box sits on the boundary, at u1 = 0, |u2| = 0.4
    assert err.best_point[0] == pytest.approx(0.0, abs=1e-12)
    assert abs(err.best_point[1]) == pytest.approx(0.4, abs=1e-12)
    assert err.best_time == pytest.approx(1.0 / 1.16, rel=1e-12)


def test_forced_point_saddle_classifies_beaks():
    prob = ConsLawProblem(BURGERS_F1, ZERO_FLUX, PHI_SADDLE)
    rec = singularity_at(prob, (0.0, 0.0))
    assert rec.t_star == pytest.approx(1.0)
    assert rec.xi[2] == pytest.approx(-12.0, rel=1e-10)
    assert rec.report.singularity_class == BEAKS


def test_forced_point_rejects_expanding_directions():
    prob = builtin_problem("burgers-rarefaction")
    with pytest.raises(ValueError):
        singularity_at(prob, (0.0, 0.0))


def test_birth_frames_straddle():
    prob = model_problem()
    res = first_singularity(prob, SMALL_BOX)
    frames = lips_birth_frames(
        prob, res.u_star, res.t_star, [0.9, 1.1], SMALL_BOX
    )
    assert [f.time for f in frames] == [0.9, 1.1]
    before, after = frames
    assert before.curves == []
    assert len(after.curves) == 1
    assert after.curves[0].closed
    # oval of 1 + 1.1*phi_1 = 0: check a vertex satisfies the level set
    g = characteristic_map(prob, 1.1, res.u_star)
    lam = g.discriminant_poly()
    for v in after.curves[0].vertices:
        assert abs(lam(v)) < 1e-9
    assert len(after.image_curves[0].vertices) == len(after.curves[0].vertices)


def test_birth_frames_require_straddling_times():
    prob = model_problem()
    with pytest.raises(ValueError):
        lips_birth_frames(prob, (0.0, 0.0), 1.0, [1.1, 1.2], SMALL_BOX)


def test_problem_spec_round_trip():
    prob = model_problem()
    again = ConsLawProblem.from_dict(prob.to_dict())
    assert again.f1.coeffs == prob.f1.coeffs
    assert again.f2.coeffs == prob.f2.coeffs
    assert again.phi.coeffs == prob.phi.coeffs


def test_builtin_problems_exist():
    for name in ("burgers-lips", "burgers-saddle", "burgers-rarefaction"):
        builtin_problem(name)
    with pytest.raises(KeyError):
        builtin_problem("not-a-problem")
