"""Distances to the Gaussian optimizer families and the stability theorems.

Oracles: family members have zero distance by construction; the odd witness
x_n e^{-|x|^2/2} under a partial weight is orthogonal to every pure Gaussian,
so its squared distance is its norm, sqrt(pi)/4 (frozen from the 1-D
integrals); the golden-section argmin is checked against the brute-force
grid-scan oracle.
"""

import math

import numpy as np
import pytest

from gausscone.errors import NotHomogeneousError
from gausscone.fields import dilated, gaussian, hermite_witness, poly_gauss
from gausscone.stability import (
    FAMILY_AFFINE_GAUSSIAN,
    FAMILY_GAUSSIAN,
    brute_force_lambda_scan,
    check_hup_stability,
    distance_to_family,
)
from gausscone.weights import Monomial, Radial, make_weight

WITNESS_NORM_SQ = math.sqrt(math.pi) / 4.0


@pytest.fixture(scope="module")
def w_abs():
    return make_weight(Monomial((1.0, 0.0)), 2)


class TestDistance:
    def test_member_zero_distance(self, w_abs):
        res = distance_to_family(w_abs, gaussian(2.0, 2.0, 2))
        assert res.distance <= 1e-7
        assert res.lam == pytest.approx(2.0, rel=1e-6)
        assert res.c == pytest.approx(2.0, rel=1e-5)
        assert not res.degenerate

    def test_witness_degenerate_orthogonal(self, w_abs):
        res = distance_to_family(w_abs, hermite_witness(1, 2))
        assert res.degenerate
        assert res.distance ** 2 == pytest.approx(WITNESS_NORM_SQ, rel=1e-10)
        assert res.c == 0.0

    def test_witness_in_affine_family(self, w_abs):
        res = distance_to_family(w_abs, hermite_witness(1, 2),
                                 FAMILY_AFFINE_GAUSSIAN)
        assert res.distance <= 1e-7
        assert res.lam == pytest.approx(1.0, rel=1e-5)
        np.testing.assert_allclose(res.d, [0.0, 1.0], atol=1e-6)

    def test_tilde_never_exceeds_d(self, w_abs):
        for seed in range(6):
            f = poly_gauss(seed, 2)
            d = distance_to_family(w_abs, f, FAMILY_GAUSSIAN).distance
            dt = distance_to_family(w_abs, f, FAMILY_AFFINE_GAUSSIAN).distance
            assert dt <= d + 1e-12

    def test_scaling_equivariance_of_argmin(self, w_abs):
        f = poly_gauss(2, 2)
        base = distance_to_family(w_abs, f)
        s = 2.0
        scaled_res = distance_to_family(w_abs, dilated(f, s))
        assert scaled_res.lam == pytest.approx(s * base.lam, rel=1e-6)

    def test_golden_matches_grid_oracle(self, w_abs):
        for seed in range(10):
            f = poly_gauss(seed + 50, 2)
            fast = distance_to_family(w_abs, f)
            oracle = brute_force_lambda_scan(w_abs, f, num=2001)
            assert fast.lam == pytest.approx(oracle.lam, rel=1e-6)
            assert fast.distance == pytest.approx(oracle.distance,
                                                  rel=1e-6, abs=1e-9)


class TestHupStability:
    def test_member_equality(self, w_abs):
        rep = check_hup_stability(w_abs, gaussian(1.0, 1.3, 2), improved=True)
        assert rep.passed
        assert abs(rep.delta) <= 1e-9
        assert rep.distance_sq <= 1e-9

    def test_witness_equality_chain(self, w_abs):
        rep = check_hup_stability(w_abs, hermite_witness(1, 2), improved=True)
        assert rep.passed
        assert rep.delta == pytest.approx(WITNESS_NORM_SQ, rel=1e-8)
        assert rep.distance_sq == pytest.approx(WITNESS_NORM_SQ, rel=1e-8)
        assert abs(rep.basic_deficit) <= 1e-6
        assert rep.improved_distance_sq <= 1e-9
        assert rep.diagnostics["lambda_star"] == pytest.approx(1.0, rel=1e-8)

    @pytest.mark.parametrize("spec,dim", [
        (Monomial((0.0, 0.0)), 2),
        (Monomial((1.0, 0.0)), 2),
        (Monomial((1.0, 2.0)), 2),
        (Radial(1.5), 1),
    ])
    def test_seeded_fields_basic_and_improved(self, spec, dim):
        w = make_weight(spec, dim)
        for seed in range(20):
            f = poly_gauss(seed + 800, dim)
            rep = check_hup_stability(w, f, improved=True)
            assert rep.basic_deficit >= -1e-7
            assert rep.improved_deficit >= -1e-7
            assert rep.passed

    def test_zero_deficit_implies_near_family(self, w_abs):
        # contrapositive of the stability bound at numeric scale: a tiny
        # deficit forces a small distance relative to the field norm
        from gausscone.functionals import nu_norm_sq
        f = gaussian(1.4, 0.9, 2)
        rep = check_hup_stability(w_abs, f)
        norm = math.sqrt(nu_norm_sq(w_abs, f))
        assert rep.delta <= 1e-8
        assert math.sqrt(rep.distance_sq) <= 1e-3 * norm

    def test_non_homogeneous_rejected(self, w_tilt):
        with pytest.raises(NotHomogeneousError):
            check_hup_stability(w_tilt, gaussian(1.0, 1.0, 1))
