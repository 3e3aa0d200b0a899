"""Measures mu_{w,lambda} = w(x) exp(-|x|^2/(2 lambda^2)) dx / Z and the
unnormalized nu = w dx, with quadrature rules accurate to a stated tolerance.

Rule families:

* tensor rules of generalized Gauss-Hermite factors whenever the weight
  factorizes per axis and the cone is an axis-aligned product of half-lines
  and full lines (monomial, axis-aligned Dunkl, one-dimensional radial,
  Gaussian tilts, and partial products of these);
* a polar tensor rule (generalized half-line Hermite in r, trapezoid in the
  angle) for radial weights on the full plane, which is exact for
  polynomial-times-Gaussian integrands just like the axis-aligned rules;
* a seeded self-normalized importance-sampling rule targeting the density
  w exp(-|x|^2/(2 lambda^2)) for everything else (general Dunkl weights,
  custom weights).  Sampling uses the counter-based Philox generator, so a
  (seed, samples) pair reproduces the rule exactly.

Integrals of Gaussian-decay fields against the unnormalized nu = w dx reuse
the same tensor factories rescaled so the rule's Gaussian factor matches the
integrand's envelope rate exactly; the remaining slowly-varying factor is
folded into the integrand.  For polynomial-times-Gaussian integrands this is
exact, which is what the identity suites rely on.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cones import Cone, FullSpace
from .errors import (
    ContractError,
    DecayContractError,
    EvaluationError,
    IntegrationFailureError,
    ParameterError,
    ResourceError,
    UnsupportedRuleError,
)
from .fields import ScalarField
from .quad1d import fullline_rule, gamma_moment, halfline_rule
from .weights import Weight

DEFAULT_ORDER = 32
DEFAULT_MC_SAMPLES = 1_000_000
MAX_TENSOR_NODES = 4_000_000


@dataclass(frozen=True)
class McInfo:
    seed: int
    samples: int
    proposal_sigma: float


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights integrating against w(x) exp(-|x|^2/(2 lambda^2)) dx."""

    nodes: np.ndarray          # (N, n), strictly interior to the cone
    weights: np.ndarray        # (N,), positive
    kind: str                  # "tensor_generalized_hermite" | "monte_carlo"
    scale: float               # lambda of the Gaussian factor
    order: Optional[tuple[int, ...]] = None  # per-axis order for tensor rules
    mc: Optional[McInfo] = None

    @property
    def mass(self) -> float:
        """Quadrature estimate of the full density mass (exact for tensor rules)."""
        return float(np.sum(self.weights))

    def to_csv(self, path: str):
        """Two-column audit dump: node coordinates (joined), weight."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(self.nodes.shape[1])] + ["weight"])
            for x, w in zip(self.nodes, self.weights):
                writer.writerow([f"{v:.17g}" for v in x] + [f"{w:.17g}"])


def _axis_scales(weight: Weight, lam: float) -> list[float] | None:
    """Per-axis effective Gaussian scales with any axis tilts folded in."""
    tilts = weight.axis_tilts()
    if tilts is None:
        return None
    scales = []
    for s in tilts:
        gamma = 1.0 / (lam * lam) + s
        if gamma <= 0:
            raise IntegrationFailureError(
                f"density w exp(-|x|^2/(2*{lam}^2)) has infinite mass "
                f"(axis tilt {s})")
        scales.append(1.0 / math.sqrt(gamma))
    return scales


def _tensor_rule(weight: Weight, lam: float, order: int) -> QuadratureRule | None:
    exps = weight.axis_exponents()
    sig = weight.cone.axis_signature()
    scales = _axis_scales(weight, lam)
    if exps is None or sig is None or scales is None:
        return None
    # weight must vanish only on constrained axes, otherwise the support is
    # not a convex cone and the tensor factorization is wrong
    for a, kind in zip(exps, sig):
        if a > 0 and kind == "full":
            return None
    if order ** weight.dim > MAX_TENSOR_NODES:
        raise ResourceError(
            f"tensor rule would need {order ** weight.dim} nodes; use Monte Carlo")
    axes_nodes, axes_weights = [], []
    for a, kind, lam_eff in zip(exps, sig, scales):
        if kind == "full":
            t, q = fullline_rule(float(a), order)
        else:
            t, q = halfline_rule(float(a), order)
            if kind == "half-":
                t = -t
        axes_nodes.append(lam_eff * t)
        axes_weights.append(lam_eff ** (a + 1.0) * q)
    grids = np.meshgrid(*axes_nodes, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*axes_weights, indexing="ij")
    weights = np.ones(len(nodes))
    for g in wgrids:
        weights = weights * g.ravel()
    return QuadratureRule(nodes, weights, "tensor_generalized_hermite",
                          lam, order=tuple([order] * weight.dim))


def _polar_rule(weight: Weight, lam: float, order: int) -> QuadratureRule | None:
    if not (weight.is_radial and weight.dim == 2
            and isinstance(weight.cone, FullSpace)):
        return None
    alpha = weight.degree
    r, qr = halfline_rule(float(alpha) + 1.0, order)
    r = lam * r
    qr = lam ** (alpha + 2.0) * qr
    m_theta = 2 * order + 2
    theta = (np.arange(m_theta) + 0.5) * (2.0 * np.pi / m_theta)
    qt = np.full(m_theta, 2.0 * np.pi / m_theta)
    nodes = np.stack([np.outer(r, np.cos(theta)).ravel(),
                      np.outer(r, np.sin(theta)).ravel()], axis=1)
    weights = np.outer(qr, qt).ravel()
    return QuadratureRule(nodes, weights, "tensor_generalized_hermite",
                          lam, order=(order, m_theta))


def _fold_to_cone(cone: Cone, z: np.ndarray) -> tuple[np.ndarray, float]:
    """Reflect standard-normal draws into the cone; return copies and the
    fold multiplicity (number of preimages, so proposal density = mult * phi)."""
    sig = cone.axis_signature()
    if sig is not None:
        x = z.copy()
        mult = 1.0
        for i, kind in enumerate(sig):
            if kind == "half+":
                x[:, i] = np.abs(x[:, i])
                mult *= 2.0
            elif kind == "half-":
                x[:, i] = -np.abs(x[:, i])
                mult *= 2.0
        return x, mult
    from .cones import Halfspace
    if isinstance(cone, Halfspace):
        nu = np.asarray(cone.normal)
        dots = z @ nu
        x = np.where((dots < 0)[:, None], -z, z)
        return x, 2.0
    raise UnsupportedRuleError(
        f"no Monte Carlo proposal for cone {type(cone).__name__}")


def _mc_rule(weight: Weight, lam: float, samples: int, seed: int) -> QuadratureRule:
    dim = weight.dim
    alpha = weight.degree if weight.degree is not None else 0.0
    sigma = lam * math.sqrt((dim + alpha) / dim) * 1.1
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = sigma * rng.standard_normal((samples, dim))
    x, mult = _fold_to_cone(weight.cone, z)
    log_prop = (-0.5 * np.sum(x ** 2, axis=1) / sigma ** 2
                - dim * math.log(sigma * math.sqrt(2.0 * math.pi))
                + math.log(mult))
    log_target = weight.spec.log_w(x) - 0.5 * np.sum(x ** 2, axis=1) / lam ** 2
    log_ratio = log_target - log_prop
    good = np.isfinite(log_ratio)  # zero-set hits carry zero weight
    w = np.zeros(samples)
    w[good] = np.exp(log_ratio[good]) / samples
    inside = weight.cone.is_interior(x, tol=1e-300)
    w[~inside] = 0.0
    return QuadratureRule(x, w, "monte_carlo", lam,
                          mc=McInfo(seed=seed, samples=samples, proposal_sigma=sigma))


_RULE_CACHE: dict[tuple, QuadratureRule] = {}


def build_rule(weight: Weight, lam: float = 1.0, order: int | None = None,
               mc_samples: int | None = None, seed: int = 0) -> QuadratureRule:
    """Quadrature rule for the density w(x) exp(-|x|^2/(2 lambda^2)) dx."""
    if lam <= 0:
        raise ParameterError("scale lambda must be positive")
    if mc_samples is None:
        order = DEFAULT_ORDER if order is None else order
        key = (weight.cache_key(), round(lam, 15), order, "det")
        rule = _RULE_CACHE.get(key)
        if rule is not None:
            return rule
        # homogeneous weights rescale exactly: nodes -> lam x, weights ->
        # lam^{n+alpha} q; this keeps the lambda sweeps in the stability
        # optimizer at O(N) per scale
        if weight.degree is not None and lam != 1.0:
            base = build_rule(weight, 1.0, order=order)
            if base.kind == "tensor_generalized_hermite":
                rule = QuadratureRule(
                    base.nodes * lam,
                    base.weights * lam ** (weight.dim + weight.degree),
                    base.kind, lam, order=base.order)
                _RULE_CACHE[key] = rule
                return rule
        rule = _tensor_rule(weight, lam, order) or _polar_rule(weight, lam, order)
        if rule is not None:
            _RULE_CACHE[key] = rule
            return rule
        mc_samples = DEFAULT_MC_SAMPLES
    key = (weight.cache_key(), round(lam, 15), mc_samples, seed, "mc")
    rule = _RULE_CACHE.get(key)
    if rule is None:
        rule = _mc_rule(weight, lam, mc_samples, seed)
        _RULE_CACHE[key] = rule
    return rule


# ---------------------------------------------------------------------------
# partition function / normalization
# ---------------------------------------------------------------------------

def partition_function(weight: Weight, lam: float = 1.0,
                       order: int = DEFAULT_ORDER) -> float:
    """Z(w, lambda) = integral of w exp(-|x|^2/(2 lambda^2)) over the cone."""
    if lam <= 0:
        raise ParameterError("scale lambda must be positive")
    exps = weight.axis_exponents()
    sig = weight.cone.axis_signature()
    scales = _axis_scales(weight, lam)
    if exps is not None and sig is not None and scales is not None and all(
            not (a > 0 and k == "full") for a, k in zip(exps, sig)):
        z = 1.0
        for a, kind, lam_eff in zip(exps, sig, scales):
            m0 = gamma_moment(float(a), 0) * lam_eff ** (a + 1.0)
            z *= 2.0 * m0 if kind == "full" else m0
        return z
    if weight.is_radial and weight.dim == 2 and isinstance(weight.cone, FullSpace):
        alpha = weight.degree
        return 2.0 * np.pi * lam ** (alpha + 2.0) * gamma_moment(alpha + 1.0, 0)
    rule = build_rule(weight, lam, order=order)
    z = rule.mass
    if not np.isfinite(z) or z <= 0:
        raise IntegrationFailureError("partition function estimate is not positive")
    return z


def normalization_constant(weight: Weight, lam: float = 1.0,
                           order: int = DEFAULT_ORDER) -> float:
    """C_{w,lambda} = 1 / Z(w, lambda)."""
    return 1.0 / partition_function(weight, lam, order)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Measure:
    """mu_{w,lambda} when scale is set; the unnormalized nu = w dx otherwise."""

    weight: Weight
    scale: Optional[float]
    rule: Optional[QuadratureRule]
    normalization: Optional[float]
    order: int = DEFAULT_ORDER

    @property
    def cone(self) -> Cone:
        return self.weight.cone

    @property
    def dim(self) -> int:
        return self.weight.dim

    @property
    def is_normalized(self) -> bool:
        return self.scale is not None

    @property
    def nodes(self) -> np.ndarray:
        if self.rule is None:
            raise ContractError("unnormalized measure has no fixed rule")
        return self.rule.nodes

    @property
    def norm_weights(self) -> np.ndarray:
        """Quadrature weights of the probability measure (sum to one)."""
        if self.rule is None or self.normalization is None:
            raise ContractError("unnormalized measure has no fixed rule")
        return self.rule.weights * self.normalization

    def describe(self) -> dict:
        return {
            "weight": repr(self.weight.spec.cache_key()),
            "dim": self.dim,
            "cone": repr(self.cone.cache_key()),
            "scale": self.scale,
            "rule": self.rule.kind if self.rule is not None else "rate-matched",
        }


def make_measure(weight: Weight, scale: float | None = 1.0,
                 order: int = DEFAULT_ORDER, mc_samples: int | None = None,
                 seed: int = 0) -> Measure:
    if scale is None:
        return Measure(weight, None, None, None, order=order)
    rule = build_rule(weight, scale, order=order, mc_samples=mc_samples, seed=seed)
    if rule.kind == "monte_carlo":
        z = rule.mass
    else:
        z = partition_function(weight, scale, order=order)
    if not np.isfinite(z) or z <= 0:
        raise IntegrationFailureError("normalization is not positive/finite")
    return Measure(weight, scale, rule, 1.0 / z, order=order)


def _values_on(f, pts: np.ndarray) -> np.ndarray:
    vals = f.value(pts) if isinstance(f, ScalarField) else f(pts)
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("integrand is not finite at a quadrature node")
    return vals


def integrate(measure: Measure, f) -> float:
    """Integral against the measure (normalized when a scale is present)."""
    value, _ = integrate_with_error(measure, f)
    return value


def integrate_with_error(measure: Measure, f) -> tuple[float, float]:
    """Integral plus a standard-error estimate (zero for deterministic rules)."""
    if not measure.is_normalized:
        if not (isinstance(f, ScalarField) and f.decay.is_gaussian):
            raise DecayContractError(
                "unnormalized nu-integration requires a Gaussian decay envelope")
        val = nu_integral(measure.weight, f.value, f.decay.rate, order=measure.order)
        return val, 0.0
    vals = _values_on(f, measure.rule.nodes)
    if measure.rule.kind == "monte_carlo":
        w = measure.rule.weights * measure.normalization
        est = float(np.sum(w * vals))
        se = float(np.sqrt(np.sum((w * (vals - est)) ** 2)))
        return est, se
    return float(np.sum(measure.norm_weights * vals)), 0.0


@dataclass(frozen=True)
class SpecialMoments:
    second_moment: float           # integral of |x|^2 dmu
    axis_moments: tuple[float, ...]  # per-axis integral of x_k^2 dmu


def special_moments(measure: Measure) -> SpecialMoments:
    if not measure.is_normalized:
        raise ContractError("special moments need a normalized measure")
    pts = measure.rule.nodes
    w = measure.norm_weights
    axis = tuple(float(np.sum(w * pts[:, k] ** 2)) for k in range(measure.dim))
    return SpecialMoments(second_moment=float(sum(axis)), axis_moments=axis)


# ---------------------------------------------------------------------------
# rate-matched unnormalized integrals
# ---------------------------------------------------------------------------

def nu_integral(weight: Weight, integrand: Callable[[np.ndarray], np.ndarray],
                rate: float, order: int = DEFAULT_ORDER) -> float:
    """Integral of integrand(x) w(x) dx for integrands ~ (slow factor) *
    exp(-rate |x|^2); the rule's Gaussian factor matches the rate exactly."""
    if rate <= 0:
        raise DecayContractError("nu-integration needs a positive Gaussian rate")
    lam = 1.0 / math.sqrt(2.0 * rate)
    rule = build_rule(weight, lam)
    pts = rule.nodes
    folded = np.asarray(integrand(pts), dtype=float) * np.exp(
        rate * np.sum(pts ** 2, axis=1))
    if not np.all(np.isfinite(folded)):
        raise EvaluationError("folded integrand is not finite at a node")
    return float(np.sum(rule.weights * folded))


def nu_field_integral(weight: Weight, f: ScalarField,
                      order: int = DEFAULT_ORDER) -> float:
    if not f.decay.is_gaussian:
        raise DecayContractError(f"field {f.name} has no Gaussian decay envelope")
    return nu_integral(weight, f.value, f.decay.rate, order=order)
