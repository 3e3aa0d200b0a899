"""Measure plumbing: descriptors, error paths, cones and serializer edges."""

import json

import numpy as np
import pytest

from gausscone.cones import FullSpace, Halfspace, Orthant, ProductCone
from gausscone.errors import EvaluationError, UnsupportedRuleError
from gausscone.fields import constant, gaussian
from gausscone.measures import (
    build_rule,
    integrate,
    make_measure,
    nu_integral,
    partition_function,
)
from gausscone.report import _clean, _emit_json
from gausscone.weights import CustomLogWeight, Monomial, make_weight


class TestMeasurePlumbing:
    def test_describe_keys(self, mu_partial):
        desc = mu_partial.describe()
        assert set(desc) == {"weight", "dim", "cone", "scale", "rule"}

    def test_non_finite_integrand(self, mu_one_1d):
        with pytest.raises(EvaluationError), np.errstate(divide="ignore"):
            integrate(mu_one_1d, lambda x: 1.0 / (x[:, 0] - x[:, 0]))

    def test_callable_and_field_agree(self, mu_one_2d):
        f = gaussian(1.0, 1.3, 2)
        a = integrate(mu_one_2d, f)
        b = integrate(mu_one_2d, f.value)
        assert a == b

    def test_custom_weight_mc_fallback(self):
        # a custom non-tensor weight on the full plane goes Monte Carlo with
        # the generic folded-Gaussian proposal
        spec = CustomLogWeight(
            lambda p: -0.1 * np.sum(p ** 2, axis=1) ** 2,
            lambda p: -0.4 * p * np.sum(p ** 2, axis=1)[:, None],
            lambda p: -(0.4 * np.sum(p ** 2, axis=1)[:, None, None]
                        * np.eye(p.shape[1])[None]
                        + 0.8 * p[:, :, None] * p[:, None, :]),
            name="soft-quartic")
        w = make_weight(spec, 2, certify=False)
        rule = build_rule(w, 1.0, mc_samples=2 ** 13, seed=1)
        assert rule.kind == "monte_carlo"
        mu = make_measure(w, 1.0, mc_samples=2 ** 13, seed=1)
        assert integrate(mu, constant(1.0, 2)) == pytest.approx(1.0, abs=1e-12)

    def test_mc_axis_aligned_product_cone_supported(self):
        # axis-aligned product cones fold like orthants
        cone = ProductCone(2, ((Orthant(1, frozenset({0})), (0,)),
                               (FullSpace(1), (1,))))
        w = make_weight(Monomial((1.0, 0.0)), 2, cone=cone)
        rule = build_rule(w, 1.0, mc_samples=2 ** 12, seed=0)
        assert np.all(rule.nodes[rule.weights > 0, 0] > 0)

    def test_mc_unsupported_cone(self):
        # a product with a tilted halfspace factor has no folded proposal
        cone = ProductCone(3, ((Halfspace(2, (0.6, 0.8)), (0, 1)),
                               (FullSpace(1), (2,))))
        spec = CustomLogWeight(
            lambda p: np.zeros(len(p)),
            lambda p: np.zeros_like(p),
            lambda p: np.zeros((len(p), p.shape[1], p.shape[1])),
            name="flat")
        w = make_weight(spec, 3, cone=cone, certify=False)
        with pytest.raises(UnsupportedRuleError):
            build_rule(w, 1.0, mc_samples=128, seed=0)

    def test_nu_integral_needs_positive_rate(self, w_one_2d):
        from gausscone.errors import DecayContractError
        with pytest.raises(DecayContractError):
            nu_integral(w_one_2d, lambda x: np.ones(len(x)), 0.0)


class TestCones:
    def test_product_cone_membership(self):
        cone = ProductCone(3, ((Orthant(1, frozenset({0})), (0,)),
                               (FullSpace(2), (1, 2))))
        assert cone.contains([1.0, -5.0, 2.0])
        assert not cone.contains([-1.0, 0.0, 0.0])
        assert cone.axis_signature() == ("half+", "full", "full")

    def test_product_cone_normal(self):
        cone = ProductCone(2, ((Orthant(1, frozenset({0})), (0,)),
                               (FullSpace(1), (1,))))
        np.testing.assert_allclose(cone.boundary_normal([0.0, 3.0]), [-1.0, 0.0])

    def test_negative_halfspace_signature(self):
        cone = Halfspace(2, (-1.0, 0.0))
        assert cone.axis_signature() == ("half-", "full")
        w = make_weight(Monomial((1.0, 0.0)), 2, cone=cone)
        rule = build_rule(w, 1.0, order=8)
        assert np.all(rule.nodes[:, 0] < 0)
        assert partition_function(w, 1.0) == pytest.approx(
            np.sqrt(2 * np.pi), rel=1e-12)

    def test_interior_sampler_respects_cone(self, rng):
        cone = Orthant(3, frozenset({0, 1}))
        pts = cone.sample_interior(rng, 500, radius=5.0)
        assert np.all(cone.is_interior(pts))
        assert np.all(np.linalg.norm(pts, axis=1) <= 5.0 + 1e-9)


class TestSerializer:
    def test_clean_handles_numpy_and_sets(self):
        out = _clean({"a": np.float64(1.5), "b": np.int64(2),
                      "c": np.bool_(True), "d": np.arange(3),
                      "e": frozenset({3, 1})})
        assert out == {"a": 1.5, "b": 2, "c": True, "d": [0, 1, 2], "e": [1, 3]}

    def test_emit_json_specials(self):
        parts = []
        _emit_json({"nan": float("nan"), "inf": float("inf"), "x": 1.25}, parts)
        payload = json.loads("".join(parts))
        assert payload == {"nan": "nan", "inf": "inf", "x": 1.25}

    def test_emit_json_sorted_keys(self):
        parts = []
        _emit_json({"b": 1, "a": 2}, parts)
        assert "".join(parts) == '{"a":2,"b":1}'
