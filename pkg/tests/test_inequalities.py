"""Inequality checkers: equality witnesses, perturbation limits, parameter
contracts and the bookkeeping identities.

Derived oracles frozen here:
  * Beckner at w = 1, n = 1, p = 1, q = 2, f = 1 + 0.01 x: closed Gaussian
    moments give lhs = rhs = eps^2 up to a tail correction of order
    e^{-5000}; the check passes with |deficit| below 1e-10.
  * gradient stability at w = 1, f = x^2: E x^2 = 1, E x^3 = 0, E x^4 = 3,
    so rhs = 4 - 2*1 = 2 and lhs = 4/2 = 2 (exact equality).
  * Euclidean LSI equality value log(C_w)/C_w - (n+alpha)/(2 C_w) at w = 1,
    n = 1: mpmath evaluates -3.5567514473: both sides must match it.
"""

import math

import numpy as np
import pytest

from gausscone.errors import ContractError, ParameterError
from gausscone.fields import (
    affine,
    constant,
    exp_axis,
    gaussian,
    gaussian_quarter,
    hermite_witness,
    one_plus,
    poly_gauss,
    scaled,
    squared,
)
from gausscone.functionals import variance
from gausscone.inequalities import (
    check_beckner,
    check_euclidean_lsi,
    check_hup,
    check_lsi,
    check_lsi_equivalence,
    check_poincare,
    check_scale_poincare,
    euclidean_lsi_rescaling_invariance,
    sharpness_sweep,
)
from gausscone.measures import make_measure
from gausscone.weights import GaussianTilt, Monomial, make_weight

EUCLID_EQUALITY_1D = -3.5567514473020886  # log(C_w)/C_w - 1/(2 C_w), C_w = (2pi)^{-1/2}
ENT_HALF = 0.8243606353500641


class TestBeckner:
    def test_constant_equality(self, mu_partial):
        chk = check_beckner(mu_partial, constant(2.0, 2), 1.0, 2.0)
        assert chk.passed and chk.lhs == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_small_perturbation(self, mu_one_1d):
        chk = check_beckner(mu_one_1d, one_plus(0.01, affine([1.0], 0.0)), 1.0, 2.0)
        assert chk.passed
        assert chk.lhs == pytest.approx(1e-4, abs=1e-10)
        assert chk.rhs == pytest.approx(1e-4, abs=1e-10)
        assert chk.deficit >= -1e-12

    def test_parameter_contract(self, mu_one_1d):
        with pytest.raises(ParameterError):
            check_beckner(mu_one_1d, constant(1.0, 1), 2.0, 2.0)
        with pytest.raises(ParameterError):
            check_beckner(mu_one_1d, constant(1.0, 1), 0.5, 2.0)

    def test_q_below_two_informational(self, mu_one_1d):
        chk = check_beckner(mu_one_1d, poly_gauss(1, 1), 1.0, 1.5)
        assert chk.informational

    def test_sharpness_ratio_to_one(self, mu_partial):
        u = affine([0.0, 1.0], 0.0)
        sweep = sharpness_sweep(
            lambda f: check_beckner(mu_partial, f, 1.0, 2.0),
            "perturbation", u=u, eps_list=[0.1, 0.05, 0.025])
        assert sweep.extrapolated_ratio == pytest.approx(1.0, abs=1e-3)

    def test_p_to_one_recovers_variance(self, mu_one_2d):
        for f in (one_plus(0.3, poly_gauss(2, 2)), exp_axis(0.4, 0, 2)):
            chk = check_beckner(mu_one_2d, f, 1.0 + 1e-6, 2.0)
            var = variance(mu_one_2d, f)
            assert abs(chk.lhs - var) <= 1e-4 * (1.0 + var)

    def test_p_to_two_approaches_lsi_lhs(self, mu_one_1d):
        # Taylor limit of the Beckner lhs at p -> q = 2 is the entropy lhs
        # for L2-normalized f
        f = one_plus(0.2, affine([1.0], 0.0))
        lsi = check_lsi(mu_one_1d, f, 2.0)
        norm = math.sqrt(float(np.sum(
            mu_one_1d.norm_weights * f.value(mu_one_1d.nodes) ** 2)))
        fn = scaled(f, 1.0 / norm)
        chk = check_beckner(mu_one_1d, fn, 2.0 - 1e-5, 2.0)
        # lsi lhs is reported as Ent(f^2); the Beckner limit gives half of it
        # for the normalized field
        assert abs(2.0 * chk.lhs - lsi.lhs / norm ** 2 * 1.0) <= 1e-4 * (
            1.0 + abs(lsi.lhs))


class TestPoincare:
    def test_partial_affine_equality(self, mu_partial):
        chk = check_poincare(mu_partial, affine([0.0, 3.0], 1.0))
        assert chk.lhs == pytest.approx(9.0, rel=1e-10)
        assert chk.rhs == pytest.approx(9.0, rel=1e-10)
        assert abs(chk.deficit) <= 1e-8

    def test_gradient_stability_x_squared(self, mu_one_1d):
        chk = check_poincare(mu_one_1d, squared(affine([1.0], 0.0)),
                             level="gradient_stability")
        assert chk.lhs == pytest.approx(2.0, rel=1e-10)
        assert chk.rhs == pytest.approx(2.0, rel=1e-10)

    def test_constant_all_levels(self, mu_partial):
        for level in ("basic", "gradient_stability", "l2_stability"):
            chk = check_poincare(mu_partial, constant(5.0, 2), level=level)
            assert chk.passed
            assert abs(chk.lhs) <= 1e-10 and abs(chk.rhs) <= 1e-10

    def test_l2_stability_x_equality_chain(self, mu_one_1d):
        # f = x: Pi(f) = x - x = 0 and rhs = 1 - 1 = 0
        chk = check_poincare(mu_one_1d, affine([1.0], 0.0), level="l2_stability")
        assert abs(chk.lhs) <= 1e-12 and abs(chk.rhs) <= 1e-12

    def test_stability_requires_q2(self, mu_one_1d):
        with pytest.raises(ParameterError):
            check_poincare(mu_one_1d, constant(1.0, 1), q=3.0,
                           level="gradient_stability")

    def test_nesting_gradient_implies_basic(self, mu_one_2d):
        # rhs_basic - lhs_basic = rhs_grad and rhs_grad >= lhs_grad >= 0
        for seed in range(5):
            f = poly_gauss(seed, 2)
            basic = check_poincare(mu_one_2d, f)
            grad = check_poincare(mu_one_2d, f, level="gradient_stability")
            assert grad.rhs == pytest.approx(basic.rhs - basic.lhs, rel=1e-9,
                                             abs=1e-12)
            assert grad.rhs >= grad.lhs >= -1e-12

    def test_shift_and_sign_invariance(self, mu_one_2d):
        f = poly_gauss(3, 2)
        base = check_poincare(mu_one_2d, f)
        shifted_chk = check_poincare(mu_one_2d, one_plus(1.0, f))
        flipped = check_poincare(mu_one_2d, scaled(f, -1.0))
        assert base.deficit == pytest.approx(shifted_chk.deficit, abs=1e-10)
        assert base.deficit == pytest.approx(flipped.deficit, abs=1e-10)


class TestScalePoincare:
    def test_lambda_one_matches_basic(self, w_partial, mu_partial):
        f = poly_gauss(1, 2, even_axes=frozenset({0}))
        a = check_scale_poincare(w_partial, f, 1.0)
        b = check_poincare(mu_partial, f)
        assert a.deficit == pytest.approx(b.deficit, abs=1e-10)

    def test_free_axis_equality_all_scales(self, w_partial):
        f = affine([0.0, 1.0], 0.0)
        for lam in (0.5, 1.0, 2.0):
            chk = check_scale_poincare(w_partial, f, lam)
            assert abs(chk.deficit) <= 1e-10

    def test_constant_improved_all_zero(self, w_partial):
        chk = check_scale_poincare(w_partial, constant(2.0, 2), 1.5,
                                   level="improved")
        assert abs(chk.lhs) <= 1e-12 and abs(chk.rhs) <= 1e-12

    def test_improved_holds_seeded(self, w_partial):
        for seed in range(5):
            f = poly_gauss(seed + 40, 2, even_axes=frozenset({0}))
            chk = check_scale_poincare(w_partial, f, 1.3, level="improved")
            assert chk.passed

    def test_bad_lambda(self, w_partial):
        with pytest.raises(ParameterError):
            check_scale_poincare(w_partial, constant(1.0, 2), -1.0)


class TestLsi:
    def test_constant(self, mu_partial):
        chk = check_lsi(mu_partial, constant(3.0, 2))
        assert chk.passed and abs(chk.lhs) <= 1e-12

    def test_partial_exp_equality(self, mu_partial):
        chk = check_lsi(mu_partial, exp_axis(0.5, 1, 2))
        assert chk.lhs == pytest.approx(ENT_HALF, rel=1e-9)
        assert chk.rhs == pytest.approx(ENT_HALF, rel=1e-9)

    def test_strict_inequality_generic(self, mu_one_1d):
        chk = check_lsi(mu_one_1d, one_plus(0.1, affine([1.0], 0.0)))
        assert chk.passed and chk.deficit > 1e-6

    def test_tilt_constant_scales(self):
        w = make_weight(GaussianTilt(-0.5), 1)
        mu = make_measure(w, 1.0)
        chk = check_lsi(mu, exp_axis(0.5, 0, 1))
        # for tilted Gaussians e^{bx} is no longer extremal but the
        # 1/(1+K_w) constant must still dominate
        assert chk.passed

    def test_sign_invariance(self, mu_one_2d):
        f = poly_gauss(5, 2)
        a = check_lsi(mu_one_2d, f)
        b = check_lsi(mu_one_2d, scaled(f, -1.0))
        assert a.deficit == pytest.approx(b.deficit, abs=1e-10)

    def test_general_q_form(self, mu_partial):
        # for ||f||_q = 1 the reported lhs is (2/q) int |f|^q log|f| dmu
        q = 3.0
        f = one_plus(0.2, exp_axis(0.3, 1, 2))
        from gausscone.functionals import lq_norm
        fn = scaled(f, 1.0 / lq_norm(mu_partial, f, q))
        chk = check_lsi(mu_partial, fn, q)
        pts = mu_partial.nodes
        w = mu_partial.norm_weights
        absf = np.abs(fn.value(pts))
        direct = (2.0 / q) * float(np.sum(w * absf ** q * np.log(absf)))
        assert chk.lhs == pytest.approx(direct, rel=1e-10)
        assert chk.passed

    def test_q_below_two_rejected(self, mu_one_1d):
        with pytest.raises(ParameterError):
            check_lsi(mu_one_1d, constant(1.0, 1), q=1.5)


class TestEuclideanLsi:
    def test_equality_at_quarter_gaussian(self, w_one_1d):
        for amp in (1.0, 2.0):
            chk = check_euclidean_lsi(w_one_1d, gaussian_quarter(amp, 1))
            expect = amp ** 2 * EUCLID_EQUALITY_1D
            assert chk.lhs == pytest.approx(expect, rel=1e-10)
            assert chk.rhs == pytest.approx(expect, rel=1e-10)
            assert abs(chk.deficit) <= 1e-7 * (1 + abs(chk.lhs) + abs(chk.rhs))

    def test_equality_partial_weight(self, w_partial):
        chk = check_euclidean_lsi(w_partial, gaussian_quarter(1.0, 2))
        assert abs(chk.deficit) <= 1e-7 * (1 + abs(chk.lhs) + abs(chk.rhs))

    def test_gaussians_of_any_width_are_extremal(self, w_one_1d):
        # the Euclidean LSI is dilation invariant, so the whole family
        # c e^{-beta |x|^2} achieves equality, not just beta = 1/4
        for lam in (1.1, 1.5, 2.0):
            chk = check_euclidean_lsi(w_one_1d, gaussian(1.0, lam, 1))
            assert abs(chk.deficit) <= 1e-7 * (1 + abs(chk.lhs))

    def test_strict_for_non_extremal(self, w_one_1d):
        chk = check_euclidean_lsi(w_one_1d, hermite_witness(0, 1))
        assert chk.passed and chk.deficit > 1e-3

    def test_rescaling_invariance(self, w_one_1d, w_partial):
        for w in (w_one_1d,):
            probe = gaussian(1.0, 1.15, w.dim)
            res = euclidean_lsi_rescaling_invariance(w, probe, lam=2.0)
            assert res["relative_change"] <= 1e-7
        res = euclidean_lsi_rescaling_invariance(
            w_partial, gaussian(1.0, 1.2, 2), lam=2.0)
        assert res["relative_change"] <= 1e-7

    def test_tilt_rejected(self, w_tilt):
        with pytest.raises(ContractError):
            check_euclidean_lsi(w_tilt, gaussian_quarter(1.0, 1))


class TestLsiEquivalence:
    def test_constant_big_f(self, w_one_1d):
        res = check_lsi_equivalence(w_one_1d, constant(1.0, 1))
        assert res["pass"]
        assert res["forward_residual"] <= 1e-12
        assert res["d_coefficient"] == 0.0
        # F = 1 means f = h: the Euclidean equality case, zero entropy on
        # the Gaussian side
        assert res["log_inequality_slack"] == pytest.approx(0.0, abs=1e-12)

    def test_exp_partial(self, w_partial):
        res = check_lsi_equivalence(w_partial, exp_axis(0.25, 1, 2))
        assert res["pass"]
        assert res["forward_residual"] <= 1e-7
        assert res["backward_residual"] <= 1e-7

    def test_poly_gauss_big_f(self, w_partial):
        res = check_lsi_equivalence(
            w_partial, poly_gauss(7, 2, even_axes=frozenset({0})))
        assert res["pass"]


class TestHup:
    def test_member_zero_deficit(self, w_partial):
        chk = check_hup(w_partial, gaussian(1.5, 0.8, 2))
        assert chk.passed
        assert abs(chk.diagnostics["delta"]) <= 1e-10

    def test_witness(self):
        w = make_weight(Monomial((1.0, 0.0)), 2)
        chk = check_hup(w, hermite_witness(1, 2))
        assert chk.diagnostics["delta"] == pytest.approx(
            math.sqrt(math.pi) / 4.0, rel=1e-10)
        assert chk.passed


class TestSweeps:
    def test_poincare_extremal_family(self, mu_partial):
        members = [affine([0.0, a], b) for a, b in ((1.0, 0.0), (3.0, 1.0))]
        sweep = sharpness_sweep(
            lambda f: check_poincare(mu_partial, f), "extremal", members=members)
        assert all(abs(r.deficit) <= 1e-9 for r in sweep.rows)

    def test_lsi_extremal_family(self, mu_partial):
        members = [exp_axis(b, 1, 2) for b in (0.25, 0.5, 1.0)]
        sweep = sharpness_sweep(
            lambda f: check_lsi(mu_partial, f), "extremal", members=members)
        assert all(abs(r.deficit) <= 1e-8 * (1 + abs(r.rhs)) for r in sweep.rows)

    def test_too_few_eps(self, mu_partial):
        with pytest.raises(ParameterError):
            sharpness_sweep(lambda f: check_poincare(mu_partial, f),
                            "perturbation", u=constant(1.0, 2), eps_list=[0.1])
