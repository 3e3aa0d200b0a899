"""Bakry-Emery Gamma-calculus for the diffusion generator

    L_w f = Lap f - x . grad f + grad(log w) . grad f,

its carre du champ Gamma(f,g) = grad f . grad g, the iterated form

    Gamma_2(f) = ||hess f||_F^2 + |grad f|^2 - hess(log w)(grad f, grad f),

the pointwise curvature-dimension margin Gamma_2 - (1+K_w) Gamma, and the
Neumann boundary residual that gates fields into orthant-cone checks.

Third derivatives never appear analytically: the Bochner identity residual
uses a centered finite difference of L_w applied to Gamma(f,f), which is the
only place they would be needed.
"""

from __future__ import annotations

import numpy as np

from .cones import Cone
from .errors import NoBoundaryError
from .fields import ScalarField
from .measures import Measure
from .weights import Weight


def _pts(x, dim: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise ValueError("point dimension mismatch")
        return arr[None, :], True
    return arr, False


def apply_generator(weight: Weight, f: ScalarField, x) -> float | np.ndarray:
    """L_w f at x (singularity errors from grad(log w) propagate)."""
    pts, single = _pts(x, weight.dim)
    lap = np.trace(f.hess(pts), axis1=1, axis2=2)
    grad = f.grad(pts)
    drift = np.sum(pts * grad, axis=1)
    tilt = np.sum(weight.grad_log(pts) * grad, axis=1)
    out = lap - drift + tilt
    return float(out[0]) if single else out


def carre_du_champ(f: ScalarField, g: ScalarField, x) -> float | np.ndarray:
    pts, single = _pts(x, f.dim)
    out = np.sum(f.grad(pts) * g.grad(pts), axis=1)
    return float(out[0]) if single else out


def gamma2(weight: Weight, f: ScalarField, x) -> float | np.ndarray:
    pts, single = _pts(x, weight.dim)
    hess = f.hess(pts)
    grad = f.grad(pts)
    frob = np.sum(hess ** 2, axis=(1, 2))
    quad = np.einsum("Nij,Ni,Nj->N", weight.hess_log(pts), grad, grad)
    out = frob + np.sum(grad ** 2, axis=1) - quad
    return float(out[0]) if single else out


def cd_margin(weight: Weight, f: ScalarField, sample: np.ndarray | None = None,
              num_points: int = 10_000, radius: float = 6.0,
              seed: int = 0) -> float:
    """min over the sample of Gamma_2(f) - (1 + K_w) Gamma(f,f).

    Nonnegative up to round-off for admissible weights (the CD(1+K_w, inf)
    condition); equality cases are affine fields under Gaussian tilts.
    """
    kw = weight.kw
    if sample is None:
        rng = np.random.default_rng(seed)
        sample = weight.cone.sample_interior(rng, num_points, radius=radius)
    g2 = gamma2(weight, f, sample)
    g = carre_du_champ(f, f, sample)
    return float(np.min(g2 - (1.0 + kw) * g))


def bochner_residual(weight: Weight, f: ScalarField, x,
                     h: float | None = None) -> float:
    """|0.5 L_w Gamma(f,f) - Gamma(f, L_w f) - Gamma_2(f)| at a point.

    The outer L_w acts on Gamma(f,f) through centered differences of step h
    (default 1e-4 * (1 + |x|)), so the residual is O(h^2) for smooth fields.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-4 * (1.0 + float(np.linalg.norm(x)))
    dim = weight.dim

    def gamma_ff(pts):
        return np.sum(f.grad(pts) ** 2, axis=1)

    # centered-difference Laplacian and gradient of Gamma(f,f)
    center = gamma_ff(x[None, :])[0]
    lap = 0.0
    grad = np.zeros(dim)
    for ax in range(dim):
        step = np.zeros(dim)
        step[ax] = h
        up = gamma_ff((x + step)[None, :])[0]
        dn = gamma_ff((x - step)[None, :])[0]
        lap += (up - 2.0 * center + dn) / h ** 2
        grad[ax] = (up - dn) / (2.0 * h)
    drift = float(x @ grad)
    tilt = float(weight.grad_log(x) @ grad)
    l_gamma = lap - drift + tilt

    # Gamma(f, L_w f) via centered differences of L_w f
    grad_lf = np.zeros(dim)
    for ax in range(dim):
        step = np.zeros(dim)
        step[ax] = h
        up = apply_generator(weight, f, x + step)
        dn = apply_generator(weight, f, x - step)
        grad_lf[ax] = (up - dn) / (2.0 * h)
    gamma_f_lf = float(f.grad(x[None, :])[0] @ grad_lf)

    return abs(0.5 * l_gamma - gamma_f_lf - gamma2(weight, f, x))


def neumann_residual(f: ScalarField, cone: Cone,
                     boundary_sample: tuple[np.ndarray, np.ndarray] | None = None,
                     count: int = 200, seed: int = 0) -> float:
    """max |grad f . eta| over sampled smooth boundary points.

    Fields even in every constrained axis return exact zero by parity.
    """
    if not cone.has_boundary:
        raise NoBoundaryError("cone has no boundary")
    sig = cone.axis_signature()
    if sig is not None:
        constrained = {i for i, k in enumerate(sig) if k != "full"}
        if constrained and constrained <= f.even_axes:
            return 0.0
    if boundary_sample is None:
        rng = np.random.default_rng(seed)
        boundary_sample = cone.boundary_sample(rng, count)
    pts, etas = boundary_sample
    grads = f.grad(pts)
    return float(np.max(np.abs(np.sum(grads * etas, axis=1))))


def is_neumann_admissible(f: ScalarField, cone: Cone, tol: float = 1e-8) -> bool:
    """Admission gate for orthant-cone inequality checks."""
    if not cone.has_boundary:
        return True
    try:
        return neumann_residual(f, cone) <= tol
    except NoBoundaryError:
        return True


def integration_by_parts_residual(measure: Measure, f: ScalarField,
                                  g: ScalarField) -> float:
    """Relative residual of int (L_w f) g dmu = -int Gamma(f,g) dmu.

    Both sides evaluate on a rule whose Gaussian factor matches the combined
    decay of the pair plus the measure's own Gaussian, so pairs of fast-
    decaying fields are integrated at full precision instead of riding the
    tail of the lambda = 1 rule.
    """
    from .measures import nu_integral

    weight = measure.weight
    lam = measure.scale if measure.scale is not None else 1.0
    rate = f.decay.rate + g.decay.rate + 0.5 / (lam * lam)
    damp = 0.5 / (lam * lam)

    def lhs_integrand(pts):
        # generator of mu_{w,lambda}: Lap - x.grad/lambda^2 + grad(log w).grad
        lap = np.trace(f.hess(pts), axis1=1, axis2=2)
        grad = f.grad(pts)
        lf = (lap - 2.0 * damp * np.sum(pts * grad, axis=1)
              + np.sum(weight.grad_log(pts) * grad, axis=1))
        return lf * g.value(pts) * np.exp(-damp * np.sum(pts ** 2, axis=1))

    def rhs_integrand(pts):
        return (np.sum(f.grad(pts) * g.grad(pts), axis=1)
                * np.exp(-damp * np.sum(pts ** 2, axis=1)))

    lhs = nu_integral(weight, lhs_integrand, rate)
    rhs = -nu_integral(weight, rhs_integrand, rate)
    return abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs))
