"""Scalar functionals compared by the inequality checkers: L^q norms,
variance, entropy, Dirichlet energy, weighted moments, the optimal
uncertainty scale lambda* and the Heisenberg deficit delta_w.

The weighted-Lebesgue (nu = w dx) functionals are restricted to fields with
Gaussian decay envelopes and evaluate on rate-matched rules, so polynomial-
times-Gaussian inputs are integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractError,
    DegenerateInputError,
    DomainError,
    EvaluationError,
    NotHomogeneousError,
    ParameterError,
)
from .fields import ScalarField
from .measures import Measure, nu_integral
from .weights import Weight

_NEG_TOL = 1e-12


@dataclass(frozen=True)
class FunctionalValue:
    """A named scalar with its measure descriptor and error estimate."""

    name: str
    value: float
    measure: dict
    error: float = 0.0


def lq_norm(measure: Measure, f: ScalarField, q: float) -> float:
    """(int |f|^q dmu)^(1/q)."""
    if q < 1:
        raise ParameterError("q must be >= 1")
    pts = measure.nodes
    vals = np.abs(f.value(pts)) ** q
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("non-finite |f|^q at a quadrature node")
    return float(np.sum(measure.norm_weights * vals)) ** (1.0 / q)


def variance(measure: Measure, f: ScalarField) -> float:
    if not measure.is_normalized:
        raise ContractError("variance requires a normalized measure")
    pts = measure.nodes
    w = measure.norm_weights
    vals = f.value(pts)
    mean = float(np.sum(w * vals))
    return max(float(np.sum(w * vals ** 2)) - mean ** 2, 0.0)


def entropy(measure: Measure, g: ScalarField) -> float:
    """Ent(g) = int g log g dmu - (int g) log(int g), with 0 log 0 := 0.

    g must be the nonnegative integrand itself (pass squared(f) for Ent(f^2)).
    """
    pts = measure.nodes
    w = measure.norm_weights
    vals = g.value(pts)
    if np.any(vals < -_NEG_TOL * (1.0 + np.max(np.abs(vals)))):
        raise DomainError("entropy integrand is negative")
    vals = np.maximum(vals, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        glogg = np.where(vals > 0.0, vals * np.log(vals), 0.0)
    total = float(np.sum(w * vals))
    if total <= 0.0:
        raise DegenerateInputError("entropy of the zero field")
    return float(np.sum(w * glogg)) - total * math.log(total)


def dirichlet_energy(measure: Measure, f: ScalarField, q: float = 2.0) -> float:
    """int |grad f|^q dmu."""
    if q < 1:
        raise ParameterError("q must be >= 1")
    pts = measure.nodes
    norms = np.linalg.norm(f.grad(pts), axis=1)
    return float(np.sum(measure.norm_weights * norms ** q))


# ---------------------------------------------------------------------------
# weighted-Lebesgue building blocks (homogeneous HUP functionals)
# ---------------------------------------------------------------------------

def _gauss_rate(f: ScalarField) -> float:
    if not f.decay.is_gaussian:
        raise ContractError(f"field {f.name} needs a Gaussian decay envelope")
    return f.decay.rate


def nu_norm_sq(weight: Weight, f: ScalarField) -> float:
    """int f^2 w dx."""
    rate = _gauss_rate(f)
    return nu_integral(weight, lambda x: f.value(x) ** 2, 2.0 * rate)


def nu_energy(weight: Weight, f: ScalarField) -> float:
    """int |grad f|^2 w dx."""
    rate = _gauss_rate(f)
    return nu_integral(
        weight, lambda x: np.sum(f.grad(x) ** 2, axis=1), 2.0 * rate)


def nu_moment_sq(weight: Weight, f: ScalarField) -> float:
    """int f^2 |x|^2 w dx."""
    rate = _gauss_rate(f)
    return nu_integral(
        weight, lambda x: f.value(x) ** 2 * np.sum(x ** 2, axis=1), 2.0 * rate)


def optimal_scale(weight: Weight, f: ScalarField) -> float:
    """lambda* = (int f^2 |x|^2 w dx / int |grad f|^2 w dx)^(1/4)."""
    num = nu_moment_sq(weight, f)
    den = nu_energy(weight, f)
    if num <= 0.0 or den <= 0.0:
        raise DegenerateInputError("optimal scale of a (numerically) zero field")
    return (num / den) ** 0.25


@dataclass(frozen=True)
class HupDeficit:
    delta: float
    identity_residual: float
    lambda_star: float
    energy: float       # int |grad f|^2 w dx
    moment: float       # int f^2 |x|^2 w dx
    norm_sq: float      # int f^2 w dx


def hup_deficit(weight: Weight, f: ScalarField) -> HupDeficit:
    """delta_w(f) = sqrt(energy) sqrt(moment) - (n+alpha)/2 * norm_sq, plus the
    residual of the completed-square identity

        delta_w(f) = (lam*^2/2) int |grad f + x f / lam*^2|^2 w dx,

    which is the expanded form of the Gaussian-conjugation identity and must
    vanish to quadrature precision for every admissible field.
    """
    if not weight.is_homogeneous:
        raise NotHomogeneousError("the HUP deficit assumes a homogeneous weight")
    energy = nu_energy(weight, f)
    moment = nu_moment_sq(weight, f)
    norm_sq = nu_norm_sq(weight, f)
    if norm_sq <= 0.0:
        raise DegenerateInputError("zero field")
    n_alpha = weight.dim + weight.degree
    delta = math.sqrt(max(energy, 0.0)) * math.sqrt(max(moment, 0.0)) \
        - 0.5 * n_alpha * norm_sq
    lam = (moment / energy) ** 0.25
    rate = _gauss_rate(f)

    def conjugated(pts):
        grad = f.grad(pts)
        vals = f.value(pts)
        shifted = grad + pts * (vals / lam ** 2)[:, None]
        return np.sum(shifted ** 2, axis=1)

    rhs = 0.5 * lam ** 2 * nu_integral(weight, conjugated, 2.0 * rate)
    residual = abs(delta - rhs)
    return HupDeficit(delta=delta, identity_residual=residual, lambda_star=lam,
                      energy=energy, moment=moment, norm_sq=norm_sq)
