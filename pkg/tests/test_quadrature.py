"""1-D rule factories and the tensor/polar/Monte-Carlo rule assembly.

Oracle for the 1-D factors: the Gamma-function closed form of the moments
    int_0^inf t^(a+k) e^(-t^2/2) dt = 2^((a+k-1)/2) Gamma((a+k+1)/2),
which each rule of order m must reproduce for k = 0..2m-1.
"""

import numpy as np
import pytest

from gausscone.cones import Halfspace
from gausscone.errors import (
    DecayContractError,
    IntegrationFailureError,
    ParameterError,
    ResourceError,
)
from gausscone.fields import constant, gaussian, poly_gauss, squared
from gausscone.measures import (
    build_rule,
    integrate,
    integrate_with_error,
    make_measure,
    normalization_constant,
    nu_integral,
    partition_function,
    special_moments,
)
from gausscone.quad1d import fullline_rule, gamma_moment, halfline_rule
from gausscone.weights import DunklProduct, GaussianTilt, Monomial, Radial, make_weight


class TestRules1D:
    @pytest.mark.parametrize("a", [0.0, 1.0, 1.5, 2.0, 4.5])
    def test_halfline_moments(self, a):
        order = 24
        x, w = halfline_rule(a, order)
        assert np.all(x > 0)
        assert np.all(w > 0)
        for k in range(2 * order):
            exact = gamma_moment(a, k)
            assert np.sum(w * x ** k) == pytest.approx(exact, rel=2e-13)

    @pytest.mark.parametrize("a", [0.0, 2.0])
    def test_fullline_moments(self, a):
        order = 20
        x, w = fullline_rule(a, order)
        for k in range(2 * order):
            exact = 0.0 if k % 2 else 2.0 * gamma_moment(a, k)
            # odd moments cancel between mirrored nodes; their round-off
            # floor scales with the neighboring even moment
            assert np.sum(w * x ** k) == pytest.approx(
                exact, rel=3e-13, abs=1e-12 * gamma_moment(a, k))

    def test_standard_hermite_exact_through_39(self):
        # order 20 on the full line integrates the Gaussian moments through
        # degree 39: oracle = double factorial (2j-1)!! sqrt(2 pi)
        x, w = fullline_rule(0.0, 20)
        moment = np.sqrt(2 * np.pi)
        for k in range(0, 40, 2):
            if k:
                moment *= (k - 1)
            assert np.sum(w * x ** k) == pytest.approx(moment, rel=1e-12)

    def test_order_cap(self):
        with pytest.raises(ResourceError):
            halfline_rule(1.0, 201)


class TestTensorRules:
    def test_monomial_orthant_positive_nodes(self, w_mono_12):
        rule = build_rule(w_mono_12, 1.0, order=16)
        assert rule.kind == "tensor_generalized_hermite"
        assert rule.nodes.shape == (256, 2)
        assert np.all(rule.nodes > 0)

    def test_dunkl_diagonal_root_falls_back_to_mc(self):
        spec = DunklProduct(((np.sqrt(0.5), np.sqrt(0.5)),), (0.75,))
        w = make_weight(spec, 2, cone=Halfspace(2, (np.sqrt(0.5), np.sqrt(0.5))))
        rule = build_rule(w, 1.0, mc_samples=5000, seed=3)
        assert rule.kind == "monte_carlo"
        assert rule.mc.seed == 3 and rule.mc.samples == 5000

    def test_mc_reproducible(self):
        spec = DunklProduct(((np.sqrt(0.5), np.sqrt(0.5)),), (0.75,))
        w = make_weight(spec, 2, cone=Halfspace(2, (np.sqrt(0.5), np.sqrt(0.5))))
        r1 = build_rule(w, 1.0, mc_samples=4096, seed=11)
        r2 = build_rule(w, 1.0, mc_samples=4096, seed=11)
        np.testing.assert_array_equal(r1.nodes, r2.nodes)
        np.testing.assert_array_equal(r1.weights, r2.weights)

    def test_rule_csv_export(self, w_mono_12, tmp_path):
        rule = build_rule(w_mono_12, 1.0, order=4)
        path = tmp_path / "rule.csv"
        rule.to_csv(str(path))
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "x0,x1,weight"
        assert len(rows) == 1 + len(rule.nodes)


class TestNormalization:
    def test_gaussian_1d(self, w_one_1d):
        assert normalization_constant(w_one_1d, 1.0) == pytest.approx(
            1.0 / np.sqrt(2 * np.pi), rel=1e-12)

    def test_monomial_12_closed_form(self, w_mono_12):
        # 1-D Gamma integrals: int_0^inf t e^{-t^2/2} = 1,
        # int_0^inf t^2 e^{-t^2/2} = sqrt(pi/2); adaptive-quadrature
        # cross-check froze 1.2533141373155003
        z = partition_function(w_mono_12, 1.0)
        assert z == pytest.approx(1.2533141373155003, rel=1e-10)

    def test_gaussian_tilt_closed_form(self):
        for s in (-0.5, 0.0, 1.7):
            for n in (1, 2, 3):
                w = make_weight(GaussianTilt(s), n)
                assert partition_function(w, 1.0) == pytest.approx(
                    (2 * np.pi / (1 + s)) ** (n / 2), rel=1e-12)

    def test_tilt_divergent(self):
        w = make_weight(GaussianTilt(-0.5), 1)
        with pytest.raises(IntegrationFailureError):
            partition_function(w, 2.0)  # 1/lambda^2 + s <= 0

    def test_partial_tilt_closed_form(self):
        # e^{-s x_1^2/2} on R^3 independent of x_2, x_3: the tensor rule must
        # fold the tilt on axis 1 only
        from gausscone.weights import PartialProduct
        w = make_weight(PartialProduct(GaussianTilt(0.8), (0,)), 3)
        z = partition_function(w, 1.0)
        assert z == pytest.approx(np.sqrt(2 * np.pi / 1.8) * 2 * np.pi, rel=1e-12)
        mu = make_measure(w, 1.0)
        moments = special_moments(mu).axis_moments
        assert moments[0] == pytest.approx(1.0 / 1.8, rel=1e-12)
        assert moments[1] == pytest.approx(1.0, rel=1e-12)

    def test_rescaling_covariance(self):
        # Z(lambda) = lambda^{n+alpha} Z(1) for homogeneous weights
        cases = [(Monomial((1.0, 2.0)), 2), (Monomial((1.5, 0.0)), 2),
                 (Radial(1.0), 2)]
        for spec, dim in cases:
            w = make_weight(spec, dim, certify=False)
            z1 = partition_function(w, 1.0)
            for lam in (0.5, 1.3, 2.0):
                assert partition_function(w, lam) == pytest.approx(
                    lam ** (dim + w.degree) * z1, rel=1e-10)


class TestIntegrate:
    def test_probability_one(self, mu_partial, mu_one_2d):
        for mu in (mu_partial, mu_one_2d):
            assert integrate(mu, constant(1.0, 2)) == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_second_moment(self, mu_one_1d):
        assert integrate(mu_one_1d, lambda x: x[:, 0] ** 2) == pytest.approx(1.0)

    def test_moment_identity_n_plus_alpha(self):
        # int |x|^2 dmu_w = n + alpha for every homogeneous weight
        cases = [(Monomial((0.0, 0.0)), 2), (Monomial((1.0, 0.0)), 2),
                 (Monomial((1.0, 2.0)), 2), (Radial(1.0), 2)]
        for spec, dim in cases:
            w = make_weight(spec, dim, certify=False)
            mu = make_measure(w, 1.0)
            got = special_moments(mu).second_moment
            assert got == pytest.approx(dim + w.degree, rel=1e-10)

    def test_partial_half_identity(self, w_partial):
        # w independent of x_n at scale lambda^2 = 1/2:
        # 2 int x_n^2 e^{-|x|^2} w = int e^{-|x|^2} w
        mu = make_measure(w_partial, 1.0 / np.sqrt(2.0))
        assert special_moments(mu).axis_moments[1] == pytest.approx(0.5, rel=1e-10)

    def test_weighted_second_moment_identity(self, w_partial):
        # w2 = x_n^2 w has degree alpha + 2: second moment (n+alpha+2)/2 at
        # the same scale
        w2 = make_weight(Monomial((1.5, 2.0)), 2)
        mu = make_measure(w2, 1.0 / np.sqrt(2.0))
        expected = (2 + 1.5 + 2.0) / 2.0
        assert special_moments(mu).second_moment == pytest.approx(expected, rel=1e-10)

    def test_order_refinement(self, w_mono_12):
        mu32 = make_measure(w_mono_12, 1.0, order=32)
        mu64 = make_measure(w_mono_12, 1.0, order=64)
        f = poly_gauss(5, 2)
        a, b = integrate(mu32, f), integrate(mu64, f)
        assert abs(a - b) <= 1e-10 * (1.0 + abs(b))

    def test_mc_standard_error(self):
        spec = DunklProduct(((np.sqrt(0.5), np.sqrt(0.5)),), (0.75,))
        w = make_weight(spec, 2, cone=Halfspace(2, (np.sqrt(0.5), np.sqrt(0.5))))
        mu = make_measure(w, 1.0, mc_samples=2 ** 14, seed=5)
        val, se = integrate_with_error(mu, lambda x: np.sum(x ** 2, axis=1))
        assert se > 0
        # degree alpha = 1.5, so the exact second moment is n + alpha = 3.5
        assert abs(val - 3.5) <= 5 * se

    def test_tensor_vs_mc_agreement(self, w_mono_12):
        # |MC - tensor| <= 4 SE in >= 95% of seeded trials
        mu_t = make_measure(w_mono_12, 1.0)
        f = squared(poly_gauss(9, 2))
        exact = integrate(mu_t, f)
        hits = 0
        trials = 40
        for seed in range(trials):
            mu_mc = make_measure(w_mono_12, 1.0, mc_samples=2 ** 13, seed=seed)
            val, se = integrate_with_error(mu_mc, f)
            if abs(val - exact) <= 4.0 * se:
                hits += 1
        assert hits >= 0.95 * trials

    def test_decay_contract(self, w_one_2d):
        nu = make_measure(w_one_2d, scale=None)
        with pytest.raises(DecayContractError):
            integrate(nu, constant(1.0, 2))
        val = integrate(nu, gaussian(1.0, 1.0, 2))
        assert val == pytest.approx(2 * np.pi * 0.5 ** 0, rel=1e-10) or val > 0

    def test_nu_integral_matches_closed_form(self, w_one_2d):
        # int e^{-|x|^2} dx over R^2 = pi
        val = nu_integral(w_one_2d, lambda x: np.exp(-np.sum(x ** 2, axis=1)), 1.0)
        assert val == pytest.approx(np.pi, rel=1e-12)

    def test_radial_polar_rule(self):
        w = make_weight(Radial(1.0), 2, certify=False)
        rule = build_rule(w, 1.0, order=24)
        assert rule.kind == "tensor_generalized_hermite"
        # oracle: int |x| e^{-|x|^2/2} dx = 2 pi int r^2 e^{-r^2/2} dr
        z = np.sum(rule.weights)
        assert z == pytest.approx(2 * np.pi * gamma_moment(2.0, 0), rel=1e-12)
        # non-radial polynomial integrand, odd parts vanish
        val = np.sum(rule.weights * (rule.nodes[:, 0] ** 2
                                     + rule.nodes[:, 0] * rule.nodes[:, 1]))
        exact = 0.5 * 2 * np.pi * gamma_moment(2.0, 2)
        assert val == pytest.approx(exact, rel=1e-12)

    def test_bad_lambda(self, w_one_1d):
        with pytest.raises(ParameterError):
            build_rule(w_one_1d, 0.0)
