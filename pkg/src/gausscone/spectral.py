"""Galerkin discretization of -L_w in an orthonormal polynomial basis under
mu_w: spectral gap, Poisson solves for the duality-based stability argument,
and the spectral realization of the semigroup P_t.

The basis is built by modified Gram-Schmidt (two passes, longdouble
accumulation) over quadrature-orthonormalized monomials with a parity filter:
on cone-constrained axes only even powers enter, which is exactly the
polynomial subspace with Neumann boundary behavior.  Analytic Hermite and
Laguerre families are deliberately not used as the code path; they reappear
in the tests as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.linalg import eigh

from .errors import (
    ContractError,
    DegreeTooHighError,
    DomainError,
    MeanZeroViolationError,
    ParameterError,
)
from .fields import ScalarField
from .measures import Measure, build_rule, partition_function
from .polys import exponent_table, monomial_axis_derivative, monomial_values

GRAM_TOL = 1e-10


def default_degree(dim: int) -> int:
    if dim <= 2:
        return 16
    if dim <= 4:
        return 10
    return 8


@dataclass
class GalerkinSystem:
    measure: Measure
    max_degree: int
    expo: np.ndarray            # (m, n) parity-filtered exponent table
    coeffs: np.ndarray          # (m, m) basis coefficients over monomials
    stiffness: np.ndarray       # (m, m) <grad p_i, grad p_j>_mu
    gram_residual: float
    parity_axes: frozenset[int]
    nodes: np.ndarray           # quadrature nodes used for projections
    node_weights: np.ndarray    # normalized quadrature weights
    basis_values: np.ndarray    # (N, m) p_k at the nodes
    _eig: Optional[tuple[np.ndarray, np.ndarray]] = dc_field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.expo.shape[0]

    # -- evaluation ---------------------------------------------------------
    def values(self, pts: np.ndarray) -> np.ndarray:
        return monomial_values(pts, self.expo) @ self.coeffs.T

    def grad_values(self, pts: np.ndarray, axis: int) -> np.ndarray:
        return monomial_axis_derivative(pts, self.expo, axis) @ self.coeffs.T

    def eval_coeffs(self, coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
        return self.values(pts) @ coeffs

    def project(self, f) -> np.ndarray:
        vals = f.value(self.nodes) if isinstance(f, ScalarField) else f(self.nodes)
        return self.basis_values.T @ (self.node_weights * vals)

    def generator_values(self) -> np.ndarray:
        """(N, m) matrix of L_w p_k at the nodes."""
        pts = self.nodes
        weight = self.measure.weight
        out = np.zeros((len(pts), self.size))
        glog = weight.grad_log(pts)
        lam2 = self.measure.scale ** 2
        for ax in range(weight.dim):
            d1 = self.grad_values(pts, ax)
            d2 = (monomial_axis_derivative(pts, self.expo, ax, order=2)
                  @ self.coeffs.T)
            # generator of mu_{w,lambda}: Lap - x.grad/lambda^2 + grad(log w).grad
            out += d2 - (pts[:, ax] / lam2)[:, None] * d1 + glog[:, ax][:, None] * d1
        return out

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            vals, vecs = eigh(self.stiffness)
            vals = np.maximum(vals, 0.0)
            self._eig = (vals, vecs)
        return self._eig

    def stiffness_to_csv(self, path: str):
        """Audit dump of the stiffness matrix."""
        np.savetxt(path, self.stiffness, delimiter=",", fmt="%.17g")


def build_galerkin(measure: Measure, max_degree: int | None = None,
                   parity: str = "neumann") -> GalerkinSystem:
    """Orthonormal polynomial Galerkin system for the Dirichlet form of mu_w.

    parity="neumann" keeps only even powers on cone-constrained axes;
    parity="all" uses the full monomial set (full-space cones only).
    """
    weight = measure.weight
    if not measure.is_normalized:
        raise ContractError("Galerkin systems need a normalized measure")
    if measure.rule is None or measure.rule.kind != "tensor_generalized_hermite":
        raise ContractError("Galerkin assembly requires a deterministic tensor rule")
    if max_degree is None:
        max_degree = default_degree(weight.dim)

    sig = weight.cone.axis_signature() or tuple(["full"] * weight.dim)
    if parity == "neumann":
        parity_axes = frozenset(i for i, k in enumerate(sig) if k != "full")
    elif parity == "all":
        parity_axes = frozenset()
    else:
        raise ParameterError(f"unknown parity filter {parity!r}")

    # the rule must integrate products of two basis gradients exactly
    order = max(measure.order, max_degree + 8)
    rule = build_rule(weight, measure.scale, order=order)
    z = partition_function(weight, measure.scale, order=order)
    nodes = rule.nodes
    qw = (rule.weights / z).astype(np.longdouble)

    expo = exponent_table(weight.dim, max_degree, even_axes=parity_axes)
    m = expo.shape[0]
    V = monomial_values(nodes, expo, dtype=np.longdouble)

    # modified Gram-Schmidt, two passes, longdouble accumulation
    C = np.zeros((m, m), dtype=np.longdouble)
    B = np.empty((len(nodes), m), dtype=np.longdouble)
    for k in range(m):
        c = np.zeros(m, dtype=np.longdouble)
        c[k] = 1.0
        v = V[:, k].copy()
        for _ in range(2):
            for j in range(k):
                r = np.sum(qw * v * B[:, j])
                v -= r * B[:, j]
                c -= r * C[j]
        nrm = np.sqrt(np.sum(qw * v * v))
        if not np.isfinite(nrm) or nrm < 1e-200:
            raise DegreeTooHighError(
                f"Gram matrix numerically singular at degree {max_degree}")
        B[:, k] = v / nrm
        C[k] = c / nrm

    gram = (B * qw[:, None]).T @ B
    gram_residual = float(np.max(np.abs(gram - np.eye(m, dtype=np.longdouble))))
    if gram_residual > GRAM_TOL:
        raise DegreeTooHighError(
            f"orthonormality residual {gram_residual:.3e} exceeds {GRAM_TOL}")

    stiffness = np.zeros((m, m), dtype=np.longdouble)
    for ax in range(weight.dim):
        D = monomial_axis_derivative(nodes, expo, ax, dtype=np.longdouble) @ C.T
        stiffness += (D * qw[:, None]).T @ D
    stiffness = np.asarray(0.5 * (stiffness + stiffness.T), dtype=float)

    return GalerkinSystem(
        measure=measure, max_degree=max_degree, expo=expo,
        coeffs=np.asarray(C, dtype=float), stiffness=stiffness,
        gram_residual=gram_residual, parity_axes=parity_axes,
        nodes=nodes, node_weights=np.asarray(qw, dtype=float),
        basis_values=np.asarray(B, dtype=float))


# ---------------------------------------------------------------------------
# spectral gap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: np.ndarray
    gap: float
    eigenvectors: np.ndarray
    gap_at_lower_degree: float
    convergence_delta: float
    converged: bool
    max_degree: int


def spectral_gap(system: GalerkinSystem,
                 convergence_step: int = 2) -> SpectralResult:
    """Ascending spectrum of -L_w on the parity-filtered span; gap = second
    eigenvalue.  Convergence compares against the degree-(d-2) system."""
    vals, vecs = system.eigensystem()
    gap = float(vals[1])
    lower = build_galerkin(system.measure,
                           max_degree=system.max_degree - convergence_step,
                           parity="neumann" if system.parity_axes else "all")
    gap_lower = float(lower.eigensystem()[0][1])
    delta = abs(gap - gap_lower)
    return SpectralResult(
        eigenvalues=vals, gap=gap, eigenvectors=vecs,
        gap_at_lower_degree=gap_lower, convergence_delta=delta,
        converged=bool(delta <= 1e-4 * max(gap, 1e-300)),
        max_degree=system.max_degree)


# ---------------------------------------------------------------------------
# Poisson equation and the duality stability chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonSolution:
    coeffs: np.ndarray
    residual: float           # ||-L_w u - P f||_{L2(mu)}, P = basis projection
    projection_error: float   # ||f - P f||_{L2(mu)}, off-span part of the rhs
    rhs_coeffs: np.ndarray


def poisson_solve(system: GalerkinSystem, f) -> PoissonSolution:
    """Solve -L_w u = f on the complement of constants; int u dmu = 0.

    The solve acts on the projected right-hand side; the off-span part of f
    is reported separately so in-span inputs certify the generator algebra
    (residual at round-off) while smooth generic inputs expose only their
    projection error.
    """
    fh = system.project(f)
    scale = float(np.linalg.norm(fh))
    if scale == 0.0:
        raise MeanZeroViolationError("zero right-hand side")
    if abs(fh[0]) > 1e-8 * scale:
        raise MeanZeroViolationError(
            f"constant component {fh[0]:.3e} of the rhs exceeds 1e-8 relative")
    uh = np.zeros_like(fh)
    uh[1:] = np.linalg.solve(system.stiffness[1:, 1:], fh[1:])
    lu = system.generator_values() @ uh
    fv = f.value(system.nodes) if isinstance(f, ScalarField) else f(system.nodes)
    proj = system.basis_values @ fh
    res = float(np.sqrt(np.sum(system.node_weights * (-lu - proj) ** 2)))
    perr = float(np.sqrt(np.sum(system.node_weights * (fv - proj) ** 2)))
    return PoissonSolution(coeffs=uh, residual=res, projection_error=perr,
                           rhs_coeffs=fh)


def duality_stability_residual(system: GalerkinSystem, f) -> dict:
    """Check the duality chain

        int |grad f|^2 - (1+K_w) int f^2  >=  int |(1+K_w) grad u - grad f|^2  >= 0

    for mean-zero f with -L_w u = f; returns the three chain values."""
    kw = system.measure.weight.kw
    fh = system.project(f)
    fh[0] = 0.0  # enforce mean zero on the projected representative
    sol_rhs = fh
    uh = np.zeros_like(fh)
    uh[1:] = np.linalg.solve(system.stiffness[1:, 1:], sol_rhs[1:])
    s = system.stiffness
    c = 1.0 + kw
    energy_f = float(fh @ s @ fh)
    norm_f = float(fh @ fh)
    cross = float(uh @ s @ fh)          # equals int f^2 by the weak Poisson form
    energy_u = float(uh @ s @ uh)
    middle = c * c * energy_u - 2.0 * c * cross + energy_f
    lhs = energy_f - c * norm_f
    return {
        "upper": lhs,
        "middle": middle,
        "chain_holds": bool(lhs >= middle - 1e-7 * (1.0 + abs(lhs))
                            and middle >= -1e-9 * (1.0 + energy_f)),
        "kw": kw,
    }


# ---------------------------------------------------------------------------
# semigroup realization
# ---------------------------------------------------------------------------

def semigroup_apply(system: GalerkinSystem, coeffs: np.ndarray,
                    t: float) -> np.ndarray:
    """exp(t L_w) in basis coordinates via the eigen-expansion."""
    if t < 0:
        raise ParameterError("semigroup time must be nonnegative")
    vals, vecs = system.eigensystem()
    return vecs @ (np.exp(-vals * t) * (vecs.T @ coeffs))


@dataclass(frozen=True)
class DecayRow:
    t: float
    phi: float
    quotient: float        # -(phi(t_next) - phi(t)) / dt; nan on the last row
    bound: float           # 2 e^{-2(1+K_w) t} (q-p) ||grad f||_q^2; nan last
    clamped_nodes: int


@dataclass(frozen=True)
class DecayCheck:
    rows: tuple[DecayRow, ...]
    decreasing: bool
    quotient_bounded: bool
    phi0: float
    phi0_expected: float       # ||f||_q^2 by direct quadrature
    phi_limit: float           # projection onto constants
    phi_limit_expected: float  # ||f||_p^2 by direct quadrature
    shift: float
    p: float
    q: float

    @property
    def passed(self) -> bool:
        return self.decreasing and self.quotient_bounded


def semigroup_decay_check(system: GalerkinSystem, f: ScalarField, p: float,
                          q: float, t_grid, slack: float = 1e-3,
                          allow_shift: bool = True) -> DecayCheck:
    """phi(t) = (int (P_t f^p)^(q/p) dmu)^(2/q) along the grid, with the
    monotonicity and difference-quotient bounds from the semigroup proof of
    the Beckner inequality.  Sign-changing f is shifted nonnegative (recorded
    in the result) unless allow_shift is False."""
    if not (1.0 <= p < q):
        raise ParameterError("need 1 <= p < q")
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    if len(t_grid) < 2 or t_grid[0] != 0.0:
        raise ParameterError("time grid must start at 0 with at least two points")
    kw = system.measure.weight.kw
    pts = system.nodes
    w = system.node_weights

    fv = f.value(pts)
    shift = 0.0
    fmin = float(np.min(fv))
    if fmin < 0:
        if not allow_shift:
            raise DomainError("decay check needs a nonnegative field")
        shift = -fmin + 1e-6
        fv = fv + shift

    fp = fv ** p
    coeffs = system.basis_values.T @ (w * fp)

    # direct-quadrature reference values for phi(0) and the t->inf limit
    phi0_expected = float(np.sum(w * fv ** q)) ** (2.0 / q)
    phi_limit_expected = float(np.sum(w * fp)) ** (2.0 / p)

    # gradient energy of the (shifted) field
    grad_norm = np.linalg.norm(f.grad(pts), axis=1)
    energy_q = float(np.sum(w * grad_norm ** q)) ** (2.0 / q)

    rows = []
    phis = []
    clamps = []
    for t in t_grid:
        vt = system.eval_coeffs(semigroup_apply(system, coeffs, float(t)), pts)
        clamped = int(np.count_nonzero(vt < 0))
        vt = np.maximum(vt, 0.0)
        phis.append(float(np.sum(w * vt ** (q / p))) ** (2.0 / q))
        clamps.append(clamped)

    decreasing = all(phis[i + 1] < phis[i] for i in range(len(phis) - 1))
    quotient_ok = True
    for i in range(len(t_grid)):
        if i + 1 < len(t_grid):
            dt = t_grid[i + 1] - t_grid[i]
            quot = -(phis[i + 1] - phis[i]) / dt
            bound = 2.0 * math.exp(-2.0 * (1.0 + kw) * t_grid[i]) * (q - p) * energy_q
            if quot > bound * (1.0 + slack) + 1e-12:
                quotient_ok = False
        else:
            quot, bound = float("nan"), float("nan")
        rows.append(DecayRow(t=float(t_grid[i]), phi=phis[i], quotient=quot,
                             bound=bound, clamped_nodes=clamps[i]))

    phi_limit = float(np.sum(w * fp)) ** (2.0 / p)  # eigenvalue-0 projection
    return DecayCheck(rows=tuple(rows), decreasing=decreasing,
                      quotient_bounded=quotient_ok, phi0=phis[0],
                      phi0_expected=phi0_expected, phi_limit=phi_limit,
                      phi_limit_expected=phi_limit_expected, shift=shift,
                      p=p, q=q)


def semigroup_gradient_bound(system: GalerkinSystem, f: ScalarField, p: float,
                             t: float) -> float:
    """Max pointwise-relative violation over the quadrature nodes of

        |grad(P_t f^p)|^2  <=  e^{-2(1+K_w)t} (P_t |grad(f^p)|)^2.

    Nonpositive (up to projection error) under CD(1+K_w, inf).  Violations
    are normalized by 1 + max(lhs, rhs) per node since both sides swing over
    many orders of magnitude across the node set.  Only fields whose
    |grad(f^p)| is smooth are meaningful here; kinked moduli project poorly
    and the check would report the projection artifact.
    """
    kw = system.measure.weight.kw
    pts = system.nodes
    w = system.node_weights
    fv = f.value(pts)
    fmin = float(np.min(fv))
    shift = -fmin + 1e-6 if fmin < 0 else 0.0
    fv = fv + shift

    fp_coeffs = system.basis_values.T @ (w * fv ** p)
    evolved = semigroup_apply(system, fp_coeffs, t)
    grad_sq = np.zeros(len(pts))
    for ax in range(system.measure.dim):
        grad_sq += (system.grad_values(pts, ax) @ evolved) ** 2

    grad_fp = p * fv ** (p - 1.0)
    grad_fp = grad_fp[:, None] * f.grad(pts)
    mod = np.linalg.norm(grad_fp, axis=1)
    mod_coeffs = system.basis_values.T @ (w * mod)
    mod_t = system.eval_coeffs(semigroup_apply(system, mod_coeffs, t), pts)
    rhs = math.exp(-2.0 * (1.0 + kw) * t) * mod_t ** 2
    # extreme tail nodes carry ~e^{-50} of the measure and see only the
    # polynomial projection's oscillation; the bound is checked where the
    # discretization represents the semigroup
    live = w >= 1e-14 * float(np.max(w))
    rel = (grad_sq - rhs) / (1.0 + np.maximum(grad_sq, rhs))
    return float(np.max(rel[live]))
