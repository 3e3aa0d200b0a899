"""Both sides of every inequality theorem, with deficits, pass verdicts and
the sharpness sweeps the proofs prescribe.

Conventions: every check is stored as lhs <= rhs with deficit = rhs - lhs and
pass iff deficit >= -tolerance.  Default tolerance is 1e-7 (1 + |lhs| + |rhs|),
quadrature-limited rather than theory-limited.  Checks outside the range the
proofs cover (q < 2 in the Beckner/Poincare family, whose Hoelder step uses
q/(q-2)) still run but carry an informational flag and never fail a suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    ContractError,
    DegenerateInputError,
    ParameterError,
)
from .fields import ScalarField, gaussian, mass_dilated, one_plus, product
from .functionals import (
    dirichlet_energy,
    lq_norm,
    nu_energy,
    nu_moment_sq,
    nu_norm_sq,
    variance,
)
from .measures import Measure, make_measure, normalization_constant, nu_integral
from .weights import Weight

TOLERANCE_SCALE = 1e-7


@dataclass(frozen=True)
class InequalityCheck:
    theorem: str
    p: float | None
    q: float | None
    lhs: float
    rhs: float
    constant: float
    deficit: float
    tolerance: float
    passed: bool
    informational: bool = False
    diagnostics: dict = dc_field(default_factory=dict)


def default_tolerance(lhs: float, rhs: float,
                      scale: float = TOLERANCE_SCALE) -> float:
    return scale * (1.0 + abs(lhs) + abs(rhs))


def _check(theorem, p, q, lhs, rhs, constant, tolerance=None,
           informational=False, diagnostics=None) -> InequalityCheck:
    tol = default_tolerance(lhs, rhs) if tolerance is None else tolerance
    deficit = rhs - lhs
    return InequalityCheck(
        theorem=theorem, p=p, q=q, lhs=float(lhs), rhs=float(rhs),
        constant=float(constant), deficit=float(deficit), tolerance=float(tol),
        passed=bool(deficit >= -tol), informational=informational,
        diagnostics=diagnostics or {})


# ---------------------------------------------------------------------------
# Beckner family
# ---------------------------------------------------------------------------

def check_beckner(measure: Measure, f: ScalarField, p: float, q: float,
                  tolerance: float | None = None) -> InequalityCheck:
    """(||f||_q^2 - ||f||_p^2)/(q-p) <= (1/(1+K_w)) (int |grad f|^q)^{2/q}."""
    if not (1.0 <= p < q):
        raise ParameterError("need 1 <= p < q")
    kw = measure.weight.kw
    nq = lq_norm(measure, f, q)
    np_ = lq_norm(measure, f, p)
    lhs = (nq ** 2 - np_ ** 2) / (q - p)
    energy = dirichlet_energy(measure, f, q)
    rhs = energy ** (2.0 / q) / (1.0 + kw)
    return _check("beckner", p, q, lhs, rhs, 1.0 / (1.0 + kw), tolerance,
                  informational=q < 2.0,
                  diagnostics={"norm_q": nq, "norm_p": np_, "energy_q": energy,
                               "note": "outside verified q-range" if q < 2.0 else ""})


def check_poincare(measure: Measure, f: ScalarField, q: float = 2.0,
                   level: str = "basic",
                   tolerance: float | None = None) -> InequalityCheck:
    """Poincare inequality and its gradient/L2 stability refinements."""
    kw = measure.weight.kw
    c = 1.0 + kw
    if level == "basic":
        if q < 1.0:
            raise ParameterError("q must be >= 1")
        var = variance(measure, f)
        energy = dirichlet_energy(measure, f, q)
        rhs = energy ** (2.0 / q) / c
        return _check("poincare", None, q, var, rhs, 1.0 / c, tolerance,
                      informational=q < 2.0,
                      diagnostics={"variance": var, "energy_q": energy})
    if q != 2.0:
        raise ParameterError("stability levels are stated at q = 2 only")
    pts = measure.nodes
    w = measure.norm_weights
    vals = f.value(pts)
    grads = f.grad(pts)
    mean = float(np.sum(w * vals))
    var = max(float(np.sum(w * vals ** 2)) - mean ** 2, 0.0)
    energy = float(np.sum(w * np.sum(grads ** 2, axis=1)))
    rhs = energy - c * var
    if level == "gradient_stability":
        # v = int (f - mean) x dmu; lhs = (1/2) int |grad f - c v|^2 dmu
        v = (w[:, None] * (vals - mean)[:, None] * pts).sum(axis=0)
        shifted = grads - c * v[None, :]
        lhs = 0.5 * float(np.sum(w * np.sum(shifted ** 2, axis=1)))
        return _check("poincare_gradient_stability", None, 2.0, lhs, rhs,
                      c, tolerance,
                      diagnostics={"projection_vector": v.tolist(),
                                   "variance": var, "energy": energy})
    if level == "l2_stability":
        m0 = mean
        vf = (w[:, None] * vals[:, None] * pts).sum(axis=0)
        mx = (w[:, None] * pts).sum(axis=0)
        t1 = vals
        t2 = -m0
        t3 = -c * (pts @ vf)
        t4 = c * m0 * (pts @ mx)
        t5 = -c * m0 * float(mx @ mx)
        t6 = c * float(vf @ mx)
        pi = t1 + t2 + t3 + t4 + t5 + t6
        lhs = 0.5 * c * float(np.sum(w * pi ** 2))
        return _check("poincare_l2_stability", None, 2.0, lhs, rhs, c, tolerance,
                      diagnostics={
                          "mean": m0, "first_moment": vf.tolist(),
                          "measure_barycenter": mx.tolist(),
                          "term_const": t2, "term_fx_scale": (-c * vf).tolist(),
                          "term_mean_x_scale": (c * m0 * mx).tolist(),
                          "term_mean_barycenter_sq": t5,
                          "term_fx_dot_barycenter": t6,
                          "variance": var, "energy": energy})
    raise ParameterError(f"unknown Poincare level {level!r}")


def _least_squares_affine_gap(measure: Measure, f: ScalarField) -> float:
    """inf over (c, d) of int |f - (c + d.x)|^2 dmu, exact via least squares."""
    pts = measure.nodes
    w = measure.norm_weights
    vals = f.value(pts)
    dim = measure.dim
    basis = np.hstack([np.ones((len(pts), 1)), pts])  # 1, x_1..x_n
    gram = (basis * w[:, None]).T @ basis
    b = basis.T @ (w * vals)
    coef = np.linalg.solve(gram, b)
    return max(float(np.sum(w * vals ** 2)) - float(b @ coef), 0.0)


def check_scale_poincare(weight: Weight, f: ScalarField, lam: float,
                         level: str = "basic", order: int | None = None,
                         tolerance: float | None = None) -> InequalityCheck:
    """Scale-dependent Poincare inequality under mu_{w,lambda}; the improved
    level adds the affine least-squares correction term."""
    if lam <= 0:
        raise ParameterError("lambda must be positive")
    kw = weight.kw
    c = 1.0 + kw
    measure = make_measure(weight, lam, order=order or 32)
    energy = dirichlet_energy(measure, f, 2.0)
    var = variance(measure, f)
    if level == "basic":
        lhs = c / (lam * lam) * var
        return _check("scale_poincare", None, 2.0, lhs, energy, c / lam ** 2,
                      tolerance, diagnostics={"lambda": lam, "variance": var})
    if level == "improved":
        affine_gap = _least_squares_affine_gap(measure, f)
        lhs = c * var + 0.5 * c * affine_gap
        rhs = lam * lam * energy
        return _check("scale_poincare_improved", None, 2.0, lhs, rhs, c,
                      tolerance,
                      diagnostics={"lambda": lam, "variance": var,
                                   "affine_gap": affine_gap})
    raise ParameterError(f"unknown scale level {level!r}")


# ---------------------------------------------------------------------------
# log-Sobolev family
# ---------------------------------------------------------------------------

def check_lsi(measure: Measure, f: ScalarField, q: float = 2.0,
              tolerance: float | None = None) -> InequalityCheck:
    """Gaussian-measure log-Sobolev inequality.

    q = 2 reports Ent(f^2) <= (2/(1+K_w)) int |grad f|^2 dmu; general q uses
    the unnormalized form (2/q^2) (int |f|^q)^{2/q-1} Ent(|f|^q) <= rhs, which
    reduces to the normalized statement when ||f||_q = 1.
    """
    if q < 2.0:
        raise ParameterError("the LSI family is stated for q >= 2")
    kw = measure.weight.kw
    pts = measure.nodes
    w = measure.norm_weights
    absf = np.abs(f.value(pts))
    iq = float(np.sum(w * absf ** q))
    if iq <= 0.0:
        raise DegenerateInputError("zero field in the LSI check")
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(absf > 0, absf ** q * np.log(absf ** q), 0.0)
    ent_q = float(np.sum(w * plogp)) - iq * math.log(iq)
    energy = dirichlet_energy(measure, f, q)
    lhs_gen = (2.0 / q ** 2) * iq ** (2.0 / q - 1.0) * ent_q
    rhs_gen = energy ** (2.0 / q) / (1.0 + kw)
    if q == 2.0:
        lhs, rhs = 2.0 * lhs_gen, 2.0 * rhs_gen
        constant = 2.0 / (1.0 + kw)
    else:
        lhs, rhs = lhs_gen, rhs_gen
        constant = 1.0 / (1.0 + kw)
    return _check("lsi", None, q, lhs, rhs, constant, tolerance,
                  diagnostics={"entropy_q": ent_q, "mass_q": iq,
                               "energy_q": energy})


def _c_lsih(weight: Weight) -> tuple[float, float, float]:
    c_w = normalization_constant(weight, 1.0)
    n_alpha = weight.dim + weight.degree
    return 4.0 * c_w ** (2.0 / n_alpha) / (math.e * n_alpha), c_w, n_alpha


def _nu_entropy_sq(weight: Weight, f: ScalarField) -> float:
    """Ent_nu(f^2) for Gaussian-decay f, by rate-matched quadrature."""
    rate = f.decay.rate

    def integrand(pts):
        v = f.value(pts) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(v > 0, v * np.log(v), 0.0)

    total = nu_norm_sq(weight, f)
    if total <= 0:
        raise DegenerateInputError("zero field")
    return nu_integral(weight, integrand, 2.0 * rate) - total * math.log(total)


def check_euclidean_lsi(weight: Weight, f: ScalarField,
                        tolerance: float | None = None) -> InequalityCheck:
    """Sharp Euclidean LSI for log-concave homogeneous weights:

        Ent_nu(f^2) <= (n+alpha)/2 * int f^2 dnu * log(C_LSIH * A / B)

    with C_LSIH = 4 C_w^{2/(n+alpha)} / (e (n+alpha)); equality at Gaussians
    A e^{-|x|^2/4}."""
    if not weight.is_homogeneous:
        raise ContractError("Euclidean LSI requires a homogeneous weight")
    if weight.kw != 0.0:
        raise ContractError("Euclidean LSI requires a log-concave weight (K_w = 0)")
    if not f.decay.is_gaussian:
        raise ContractError("field needs a Gaussian decay envelope")
    c_lsih, c_w, n_alpha = _c_lsih(weight)
    b = nu_norm_sq(weight, f)
    if b <= 0:
        raise DegenerateInputError("zero field")
    a = nu_energy(weight, f)
    ent = _nu_entropy_sq(weight, f)
    rhs = 0.5 * n_alpha * b * math.log(c_lsih * a / b)
    return _check("euclidean_lsi", None, 2.0, ent, rhs, c_lsih, tolerance,
                  diagnostics={"C_w": c_w, "n_plus_alpha": n_alpha,
                               "mass": b, "energy": a})


def check_lsi_equivalence(weight: Weight, big_f: ScalarField,
                          order: int = 32) -> dict:
    """Term-by-term bookkeeping tying the Euclidean LSI to the Gaussian one.

    forward: with h = sqrt(C_w) e^{-|x|^2/4} and f = F h,
        Ent_mu(F^2) = Ent_nu(f^2) - int f^2 log h^2 dnu
        int |grad F|^2 dmu = int |grad f|^2 dnu - (n+alpha)/2 int f^2 dnu
                             + 1/4 int |x|^2 f^2 dnu
    backward: the linearization log t <= s t - log s - 1 at s = e/C_w^{2/(n+a)}
    turns the Euclidean bound into Ent_mu(F^2) <= 2 int |grad F|^2 dmu; the
    coefficient of int |x|^2 f^2 dnu in that assembly cancels exactly.
    """
    if not weight.is_homogeneous or weight.kw != 0.0:
        raise ContractError("requires a log-concave homogeneous weight")
    c_lsih, c_w, n_alpha = _c_lsih(weight)
    h = gaussian(math.sqrt(c_w), math.sqrt(2.0), weight.dim)
    f = product(big_f, h)

    # all five terms evaluate on the same rate-matched rule (2 rate_F + 1/2 is
    # exactly twice the decay rate of f = F h), so the bookkeeping identities
    # are checked at quadrature precision even for fields with log-singular
    # entropy integrands
    rate_mu = 2.0 * big_f.decay.rate + 0.5

    def _mu_int(fn):
        return c_w * nu_integral(weight, fn, rate_mu)

    def _ent_integrand(pts):
        v = big_f.value(pts) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            vlogv = np.where(v > 0, v * np.log(v), 0.0)
        return vlogv * np.exp(-0.5 * np.sum(pts ** 2, axis=1))

    mass_mu = _mu_int(
        lambda x: big_f.value(x) ** 2 * np.exp(-0.5 * np.sum(x ** 2, axis=1)))
    ent_mu = _mu_int(_ent_integrand) - mass_mu * math.log(mass_mu)
    energy_mu = _mu_int(
        lambda x: np.sum(big_f.grad(x) ** 2, axis=1)
        * np.exp(-0.5 * np.sum(x ** 2, axis=1)))

    b = nu_norm_sq(weight, f)
    a = nu_energy(weight, f)
    d = nu_moment_sq(weight, f)
    ent_nu = _nu_entropy_sq(weight, f)
    f2_log_h2 = math.log(c_w) * b - 0.5 * d

    scale = 1.0 + abs(ent_mu) + abs(ent_nu) + abs(energy_mu)
    res_entropy = abs(ent_mu - (ent_nu - f2_log_h2)) / scale
    res_energy = abs(energy_mu - (a - 0.5 * n_alpha * b + 0.25 * d)) / scale

    # backward assembly: Ent_nu(f^2) <= 2A + (log C_w - (n+alpha)) B after the
    # log linearization; subtracting int f^2 log h^2 dnu from both sides and
    # substituting f = F h must land exactly on the Gaussian LSI.  The
    # coefficient of D in the pre-linearization assembly is 2*(1/4) - 1/2.
    d_coefficient = 2.0 * 0.25 - 0.5
    euclid_linear_rhs = 2.0 * a + (math.log(c_w) - n_alpha) * b
    gaussian_rhs_via_euclid = euclid_linear_rhs - f2_log_h2
    res_backward = abs(2.0 * energy_mu - gaussian_rhs_via_euclid) / scale

    t_arg = c_lsih * a / b
    s_arg = math.e / c_w ** (2.0 / n_alpha)
    log_slack = s_arg * t_arg - math.log(s_arg) - 1.0 - math.log(t_arg)

    tol = 1e-7
    return {
        "forward_residual": max(res_entropy, res_energy),
        "backward_residual": res_backward,
        "entropy_residual": res_entropy,
        "energy_residual": res_energy,
        "d_coefficient": d_coefficient,
        "log_inequality_slack": log_slack,
        "gaussian_lsi_holds": bool(
            ent_mu <= 2.0 * energy_mu + tol * scale),
        "euclidean_lsi_holds": bool(
            ent_nu <= 0.5 * n_alpha * b * math.log(t_arg) + tol * scale),
        "pass": bool(max(res_entropy, res_energy) <= tol
                     and res_backward <= tol
                     and d_coefficient == 0.0
                     and log_slack >= -1e-12),
    }


def euclidean_lsi_rescaling_invariance(weight: Weight, f: ScalarField,
                                       lam: float = 2.0) -> dict:
    """Relative change of the Euclidean-LSI deficit under the mass-preserving
    dilation f_lam = lam^{(n+alpha)/2} f(lam x); zero in exact arithmetic."""
    base = check_euclidean_lsi(weight, f)
    n_alpha = weight.dim + weight.degree
    f_lam = mass_dilated(f, lam, n_alpha)
    scaled = check_euclidean_lsi(weight, f_lam)
    denom = 1.0 + abs(base.rhs) + abs(scaled.rhs)
    return {
        "deficit": base.deficit,
        "deficit_rescaled": scaled.deficit,
        "relative_change": abs(base.deficit - scaled.deficit) / denom,
    }


# ---------------------------------------------------------------------------
# HUP wrapper
# ---------------------------------------------------------------------------

def check_hup(weight: Weight, f: ScalarField,
              tolerance: float | None = None) -> InequalityCheck:
    """sqrt(energy) sqrt(moment) >= (n+alpha)/2 * norm; the deficit is
    delta_w(f) and the conjugation-identity residual rides in diagnostics."""
    from .functionals import hup_deficit
    res = hup_deficit(weight, f)
    n_alpha = weight.dim + weight.degree
    lhs = 0.5 * n_alpha * res.norm_sq
    rhs = math.sqrt(res.energy) * math.sqrt(res.moment)
    tol = tolerance if tolerance is not None else default_tolerance(lhs, rhs)
    identity_ok = res.identity_residual <= 1e-8 * (1.0 + abs(res.delta))
    check = _check("hup", None, 2.0, lhs, rhs, 0.5 * n_alpha, tol,
                   diagnostics={"delta": res.delta,
                                "identity_residual": res.identity_residual,
                                "lambda_star": res.lambda_star,
                                "identity_ok": identity_ok})
    if not identity_ok:
        check = InequalityCheck(**{**check.__dict__, "passed": False})
    return check


# ---------------------------------------------------------------------------
# sharpness sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    parameter: float | str
    lhs: float
    rhs: float
    deficit: float
    deficit_over_eps_sq: float | None
    ratio: float | None


@dataclass(frozen=True)
class SweepResult:
    kind: str
    rows: tuple[SweepRow, ...]
    extrapolated_ratio: float | None


def sharpness_sweep(check_fn, kind: str, *, u: ScalarField | None = None,
                    eps_list=None, members=None) -> SweepResult:
    """Run a checker along a perturbation family f = 1 + eps u (reporting
    deficit/eps^2 and the lhs/rhs ratio with a Richardson limit on the two
    smallest eps) or along explicit extremal members (absolute deficits)."""
    if kind == "perturbation":
        if u is None or eps_list is None or len(eps_list) < 2:
            raise ParameterError("perturbation sweeps need u and >= 2 eps values")
        rows = []
        ratios = {}
        for eps in sorted(set(float(e) for e in eps_list), reverse=True):
            chk = check_fn(one_plus(eps, u))
            ratio = chk.lhs / chk.rhs if chk.rhs != 0 else None
            rows.append(SweepRow(eps, chk.lhs, chk.rhs, chk.deficit,
                                 chk.deficit / eps ** 2, ratio))
            ratios[eps] = ratio
        two = sorted(ratios)[:2]  # two smallest eps
        extrapolated = None
        if len(two) == 2 and all(ratios[e] is not None for e in two):
            e2, e1 = two[0], two[1]
            # odd perturbations have even-in-eps expansions
            k = 2 if u.odd_axes else 1
            w1, w2 = e1 ** k, e2 ** k
            extrapolated = (w1 * ratios[e2] - w2 * ratios[e1]) / (w1 - w2)
        return SweepResult("perturbation", tuple(rows), extrapolated)
    if kind == "extremal":
        if not members:
            raise ParameterError("extremal sweeps need family members")
        rows = []
        for g in members:
            chk = check_fn(g)
            rows.append(SweepRow(g.name, chk.lhs, chk.rhs, chk.deficit, None,
                                 chk.lhs / chk.rhs if chk.rhs != 0 else None))
        return SweepResult("extremal", tuple(rows), None)
    raise ParameterError(f"unknown sweep kind {kind!r}")
