"""Closed-form asymptotics: the entropy integral, the determinant ratio,
the genus-1 series, and the critical scaling estimator.

Everything here reduces to the theta ratio

    R(beta) = theta(beta e + tau/2) theta(beta e - tau/2) / theta(tau/2)**2

evaluated along beta(lambda) = log((lambda+1)/(lambda-1)) / (2 pi i) for
lambda in (1, inf).  The entropy is half the integral of log R; the
block-Toeplitz determinant behaves like (1 - lambda**2)**L times R.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import CurveData
from .errors import (DomainError, GenusMismatch, NoDegeneratePairs,
                     QuadratureFailure)
from .exact import binary_entropy
from .symbol import SymbolData

_IMAG_TOL = 1e-8


@dataclass
class EntropyEstimate:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def beta_function(lam) -> np.ndarray:
    """beta(lambda) = log((lambda+1)/(lambda-1)) / (2 pi i), principal branch.

    Purely imaginary for real lambda with |lambda| > 1; undefined on [-1, 1].
    """
    lam = np.asarray(lam, dtype=complex)
    on_cut = (np.abs(lam.imag) < 1e-14) & (np.abs(lam.real) <= 1.0 + 1e-14)
    if np.any(on_cut):
        raise DomainError("beta(lambda) undefined on the segment [-1, 1]")
    val = np.log((lam + 1.0) / (lam - 1.0)) / (2j * np.pi)
    return val if val.shape else complex(val)


def log_theta_ratio_beta(curve: CurveData, betas) -> np.ndarray:
    """log R(beta) for given beta values (imaginary on the physical line)."""
    ctx = curve.theta_ctx
    b = np.atleast_1d(np.asarray(betas, dtype=complex))
    e = curve.e_vector.astype(complex)
    th = curve.tau_half
    S = np.concatenate([np.outer(b, e) + th, -np.outer(b, e) + th])
    logs = ctx.log_theta_many(S)
    m = len(b)
    l0 = ctx.log_theta(th)
    return logs[:m] + logs[m:] - 2.0 * l0


def log_theta_ratio(curve: CurveData, lam) -> np.ndarray:
    """log R(beta(lambda)); imaginary parts are 2 pi windings for real lam > 1."""
    return log_theta_ratio_beta(curve, beta_function(lam))


def theta_ratio(curve: CurveData, lam) -> np.ndarray:
    return np.exp(log_theta_ratio(curve, lam))


def _real_integrand_beta(curve: CurveData, betas) -> np.ndarray:
    vals = log_theta_ratio_beta(curve, betas)
    imag = vals.imag - 2 * np.pi * np.rint(vals.imag / (2 * np.pi))
    worst = float(np.max(np.abs(imag))) if len(imag) else 0.0
    if worst > _IMAG_TOL:
        raise QuadratureFailure(
            f"entropy integrand has imaginary residue {worst:.3e}")
    return vals.real, worst


def _real_integrand(curve: CurveData, lams: np.ndarray) -> np.ndarray:
    return _real_integrand_beta(curve, beta_function(lams))


def _gl_refine(f, a: float, b: float, tol: float, max_nodes: int = 2048):
    """Doubling Gauss-Legendre for a scalar real integrand batched over nodes."""
    from .curve import _gl_rule
    N = 16
    prev = None
    while N <= max_nodes:
        x, w = _gl_rule(N)
        t = a + (b - a) * 0.5 * (x + 1.0)
        val = float(f(t) @ w * (b - a) * 0.5)
        if prev is not None and abs(val - prev) <= tol * (1.0 + abs(val)):
            return val
        prev = val
        N *= 2
    raise QuadratureFailure("entropy quadrature did not converge")


def entropy_theta(curve: CurveData, tol: float = 1e-9) -> EntropyEstimate:
    """S = (1/2) int_1^inf log R(beta(lambda)) d lambda.

    Composite rule: lambda = 1 + exp(-u) absorbs the integrable log**2
    endpoint growth, a plain Gauss panel covers the middle, and lambda = 1/t
    compactifies the tail.
    """
    curve.symbol.require_noncritical()
    curve.require_standard()
    imag_worst = 0.0

    def f_u(u):
        # lambda = 1 + exp(-u); beta from u analytically (lambda-1 underflows)
        nonlocal imag_worst
        betas = (u + np.log(2.0 + np.exp(-u))) / (2j * np.pi)
        vals, w = _real_integrand_beta(curve, betas)
        imag_worst = max(imag_worst, w)
        return vals * np.exp(-u)

    def f_mid(lam):
        nonlocal imag_worst
        vals, w = _real_integrand(curve, lam)
        imag_worst = max(imag_worst, w)
        return vals

    def f_tail(t):
        nonlocal imag_worst
        vals, w = _real_integrand(curve, 1.0 / t)
        imag_worst = max(imag_worst, w)
        return vals / t ** 2

    # lambda in (1, 2]: u in [0, 46] (lambda - 1 down to ~1e-20)
    val = _gl_refine(f_u, 0.0, 46.0, tol)
    val += _gl_refine(f_mid, 2.0, 4.0, tol)
    val += _gl_refine(f_tail, 1e-12, 0.25, tol)
    s = 0.5 * val

    x_inv_e = np.linalg.solve(curve.Pi.imag, curve.e_vector)
    endpoint_coeff = -2.0 * np.pi * float(curve.e_vector @ x_inv_e)
    return EntropyEstimate(
        value=float(s), method="theta_integral",
        diagnostics={
            "imag_residue_max": imag_worst,
            "endpoint_coefficient": endpoint_coeff,
        })


def endpoint_behavior(curve: CurveData, decades=(12, 60)) -> dict:
    """Fit integrand/beta**2 = c0 + c1/|beta| + c2/|beta|**2 near lambda = 1.

    The limit c0 should equal -2 pi <e, (Im Pi)^-1 e>; the expansion in
    1/|beta| removes the slowly decaying corrections (|beta| grows only like
    log(1/(lambda-1)), so raw ratios converge very slowly).
    """
    exps = np.linspace(decades[0], decades[1], 9)
    x = 10.0 ** (-exps)  # lambda - 1
    b = (-np.log(x) + np.log(2.0 + x)) / (2j * np.pi)
    vals, _ = _real_integrand_beta(curve, b)
    ratio = vals / (b.real ** 2 + b.imag ** 2) * (-1.0)  # beta^2 = -|beta|^2
    ab = np.abs(b)
    A = np.stack([np.ones_like(ab), 1.0 / ab, 1.0 / ab ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(A, ratio, rcond=None)
    x_inv_e = np.linalg.solve(curve.Pi.imag, curve.e_vector)
    target = -2.0 * np.pi * float(curve.e_vector @ x_inv_e)
    return {"fitted": float(coef[0]), "target": target,
            "rel_error": abs(coef[0] - target) / abs(target)}


def determinant_asymptotic(curve: CurveData, lam: complex, L: int):
    """Asymptotic D_L(lambda) = (1-lambda^2)^L R(beta) and the ratio R itself."""
    lam = complex(lam)
    if abs(lam.imag) > 1e-12 or abs(lam.real) <= 1.0:
        raise DomainError("determinant asymptotics needs real |lambda| > 1")
    curve.require_standard()
    log_r = complex(log_theta_ratio(curve, lam)[0])
    log_val = L * np.log(1.0 - lam * lam + 0j) + log_r
    return np.exp(log_val), np.exp(log_r)


def log_determinant_asymptotic(curve: CurveData, lam: complex, L: int) -> complex:
    lam = complex(lam)
    log_r = complex(log_theta_ratio(curve, lam)[0])
    return L * np.log(1.0 - lam * lam + 0j) + log_r


def critical_entropy_estimate(symbol: SymbolData,
                              pair_tol: float = 0.25) -> EntropyEstimate:
    """Divergence-rate estimator -(1/6) sum log|lambda - 1/conj(lambda)|.

    Sums over branch points inside the unit circle whose reciprocal-conjugate
    partner lies within ``pair_tol``; valid up to an additive O(1) constant.
    """
    lam = symbol.lam
    inside = lam[np.abs(lam) < 1.0]
    partners = 1.0 / np.conj(inside)
    dist = np.abs(inside - partners)
    mask = dist < pair_tol
    if not np.any(mask):
        raise NoDegeneratePairs(
            f"no branch-point pairs within {pair_tol} of the unit circle")
    value = float(-np.sum(np.log(dist[mask])) / 6.0)
    return EntropyEstimate(
        value=value, method="critical_scaling",
        diagnostics={"pairs": int(np.sum(mask)),
                     "distances": dist[mask].tolist()})


def xy_series_entropy(curve: CurveData, sigma: int | None = None,
                      terms: int = 200, tail_tol: float = 1e-12,
                      reference: float | None = None) -> EntropyEstimate:
    """Genus-1 series S = 2 sum_m e(1, mu_m), mu_m = -i tan((m+(1-sigma)/2) pi tau).

    sigma (0 or 1) selects which theta characteristic vanishes; when not
    given, both partial sums are computed and the one matching the theta
    integral (or ``reference``) is returned.
    """
    if curve.genus != 1:
        raise GenusMismatch("the series form exists only for genus 1")
    tau = complex(curve.Pi[0, 0])

    def series(sig):
        # the index set is all integers; mu_{-m-1} = -mu_m for sigma = 0 but
        # sigma = 1 has the self-paired zero mu_0 = 0, counted once
        total = 0.0
        for m in range(terms):
            mu = -1j * np.tan((m + (1 - sig) / 2.0) * np.pi * tau)
            if abs(mu.imag) > 1e-9:
                return None, m  # complex occupation: wrong branch
            mu_r = float(np.clip(mu.real, -1.0, 1.0))
            weight = 1.0 if (sig == 1 and m == 0) else 2.0
            term = weight * binary_entropy(1.0, mu_r)
            total += term
            if term < tail_tol and m > 2:
                return total, m + 1
        return total, terms

    results = {}
    for sig in (0, 1):
        val, used = series(sig)
        if val is not None:
            results[sig] = (val, used)
    if not results:
        raise GenusMismatch("series occupation numbers fail to be real")

    if sigma is None:
        if reference is None:
            reference = entropy_theta(curve).value
        sigma = min(results, key=lambda s: abs(results[s][0] - reference))
    elif sigma not in results:
        raise GenusMismatch(f"sigma={sigma} branch gives complex occupations")
    val, used = results[sigma]
    return EntropyEstimate(
        value=float(val), method="xy_series",
        diagnostics={"sigma": int(sigma), "terms_used": int(used),
                     "candidates": {int(k): float(v[0]) for k, v in results.items()}})
