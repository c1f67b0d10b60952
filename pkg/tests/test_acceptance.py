"""Acceptance criteria, one test per criterion, one PASS/FAIL line each.

Run with  python3 -m pytest tests/test_acceptance.py -v -s
"""

import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import ellipk

from spinchain_entropy import rh
from spinchain_entropy.asymptotics import (beta_function, endpoint_behavior,
                                           entropy_theta,
                                           log_determinant_asymptotic)
from spinchain_entropy.curve import build_curve
from spinchain_entropy.exact import (entropy_exact, spectrum_for_block,
                                     toeplitz_determinant_direct,
                                     toeplitz_determinant_spectral,
                                     toeplitz_logdet_direct)
from spinchain_entropy.model import make_xx_model, make_xy_model
from spinchain_entropy.symbol import build_symbol
from spinchain_entropy.theta import ThetaContext
from util import genus3_reference, random_chain_models, xy_reference


def _line(num, ok, text):
    state = "PASS" if ok else "FAIL"
    print(f"{state} criterion {num}: {text}")
    assert ok, f"criterion {num}: {text}"


@pytest.fixture(scope="module")
def reference_setups():
    out = []
    for model in (xy_reference(), genus3_reference()):
        sym = build_symbol(model)
        out.append((sym, build_curve(sym)))
    return out


def test_criterion_1_xx_critical_slope():
    t0 = time.time()
    sym = build_symbol(make_xx_model(2.0), allow_critical=True)
    Ls = np.array([64, 96, 128, 192, 256, 384, 512])
    S = np.array([entropy_exact(sym, int(L)) for L in Ls])
    A = np.stack([np.log(Ls), np.ones_like(Ls, dtype=float)], axis=1)
    slope = np.linalg.lstsq(A, S, rcond=None)[0][0]
    elapsed = time.time() - t0
    rel = abs(slope - 1.0 / 3.0) * 3.0
    _line(1, rel < 0.02 and elapsed < 60.0,
          f"XX slope {slope:.6f} vs 1/3 (rel {rel:.2e}), {elapsed:.1f}s")


def test_criterion_2_exact_vs_theta_oracle(reference_setups):
    t0 = time.time()
    ok = True
    notes = []
    for label, (sym, curve) in zip(("genus1", "genus3"), reference_setups):
        assert sym.crit_distance > 0.2
        s_theta = entropy_theta(curve, tol=1e-10).value
        diffs = [abs(entropy_exact(sym, L) - s_theta)
                 for L in (50, 100, 150, 200)]
        ok &= diffs[-1] < 1e-4
        # geometric decrease until the quadrature floor
        for a, b in zip(diffs, diffs[1:]):
            ok &= b <= max(0.5 * a, 5e-11)
        notes.append(f"{label} |diff(200)|={diffs[-1]:.2e}")
    elapsed = time.time() - t0
    _line(2, ok and elapsed < 120.0, "; ".join(notes) + f", {elapsed:.1f}s")


def test_criterion_3_determinant_asymptotics(reference_setups):
    lam = 2.0
    ok = True
    notes = []
    for label, (sym, curve) in zip(("genus1", "genus3"), reference_setups):
        errs = {}
        for L in (6, 12, 18, 80):
            ld = toeplitz_logdet_direct(sym, lam, L)
            la = log_determinant_asymptotic(curve, lam, L)
            errs[L] = abs(np.exp(ld - la) - 1.0)
        ok &= errs[80] < 1e-6
        rho_min = min(abs(l) for l in curve.lam if abs(l) > 1)
        rate = (errs[6] / errs[18]) ** (1.0 / 12.0)
        ok &= rate > 0.95 * rho_min
        notes.append(f"{label} err(80)={errs[80]:.1e} rate={rate:.2f} "
                     f"(min outside |lambda|={rho_min:.2f})")
    _line(3, ok, "; ".join(notes))


def test_criterion_4_critical_scaling():
    # Faithful implementation of the stated check.  The difference
    # S(d) - S(d/2) carries a 1/|log d| correction to the (1/6) log 2 step
    # (measured coefficient ~0.58), so at d in {0.1, 0.05, 0.025} the true
    # values sit 50/34/21 percent above the target; 5 percent is first
    # reached near d ~ 1.5e-3, which needs L ~ 5000 blocks.  The criterion
    # is therefore expected to fail; the numbers below document it.
    gamma = 0.5

    def inner_root(alpha):
        a2 = alpha * (1 - gamma) / 2
        a0 = alpha * (1 + gamma) / 2
        return (1 - np.sqrt(1 - 4 * a2 * a0)) / (2 * a2)

    def alpha_for_crit(d):
        return brentq(lambda a: (1 - inner_root(a)) - d, 0.3, 0.9999999)

    L = 512
    S = {}
    for d in (0.1, 0.05, 0.025, 0.0125):
        sym = build_symbol(make_xy_model(alpha_for_crit(d), gamma),
                           allow_critical=True)
        S[d] = entropy_exact(sym, L)
    target = np.log(2.0) / 6.0  # one degenerating pair on this path
    rels = []
    diffs = {}
    for d in (0.1, 0.05, 0.025):
        diffs[d] = S[d / 2] - S[d]
        rels.append(abs(diffs[d] - target) / target)
        print(f"  criterion 4 data: S({d/2}) - S({d}) = {diffs[d]:.6f} "
              f"(target {target:.6f}, rel {rels[-1]:.1%})")
    # the correction model diff = T + c log2/(log d log(d/2)) extrapolates to
    # the step constant; printed as supporting evidence for the coefficient
    w = {d: 1.0 / (np.log(d) * np.log(d / 2)) for d in (0.05, 0.025)}
    T_extrap = (diffs[0.025] * w[0.05] - diffs[0.05] * w[0.025]) / (w[0.05] - w[0.025])
    print(f"  criterion 4 data: 1/log-extrapolated step = {T_extrap:.6f} "
          f"(target {target:.6f}, rel {abs(T_extrap - target)/target:.1%})")
    ok = all(r < 0.05 for r in rels)
    _line(4, ok, "S(d)-S(d/2) vs (pairs/6) ln 2 at d in {0.1, 0.05, 0.025}: "
          + ", ".join(f"{r:.1%}" for r in rels)
          + " (5% tolerance unattainable at these d: 1/|log d| correction)")


def test_criterion_5_curve_invariants_random_family():
    t0 = time.time()
    models = random_chain_models(20, seed=20240601)
    ok = True
    worst = {"asym": 0.0, "kappa": 0.0, "halfper": 0.0, "ell": 0.0}
    n_genus1 = 0
    for model in models:
        sym = build_symbol(model)
        curve = build_curve(sym)
        d = curve.diagnostics
        worst["asym"] = max(worst["asym"], d["pi_asymmetry"])
        worst["kappa"] = max(worst["kappa"], min(d["kappa_residual_exact"],
                                                 d["kappa_residual_mod_lattice"]))
        worst["halfper"] = max(worst["halfper"], d["half_period_residual"])
        ok &= d["pi_asymmetry"] < 1e-9
        ok &= min(d["im_pi_eigs"]) > 1e-10
        ok &= min(d["kappa_residual_exact"], d["kappa_residual_mod_lattice"]) < 1e-8
        ok &= d["half_period_residual"] < 1e-8
        ctx = curve.theta_ctx
        scale = abs(ctx.theta(np.zeros(curve.genus)))
        for i in range(2, len(curve.lam), 2):
            ok &= abs(ctx.theta(curve.half_period_value(i))) < 1e-8 * scale
        for i in range(1, len(curve.lam), 2):
            ok &= abs(ctx.theta(curve.half_period_value(i))) > 1e-6 * scale
        if curve.genus == 1:
            n_genus1 += 1
            a, b, c, dd = curve.lam.real
            m = ((dd - c) * (b - a)) / ((dd - b) * (c - a))
            if 0 < m < 1:
                expected = 1j * ellipk(1 - m) / ellipk(m)
                err = abs(curve.Pi[0, 0] - expected)
                worst["ell"] = max(worst["ell"], err)
                ok &= err < 1e-9
    elapsed = time.time() - t0
    _line(5, ok,
          f"20 models (n<=3, {n_genus1} genus-1): max Pi asymmetry "
          f"{worst['asym']:.1e}, kappa {worst['kappa']:.1e}, "
          f"half-periods {worst['halfper']:.1e}, elliptic {worst['ell']:.1e}, "
          f"{elapsed:.0f}s")


def test_criterion_6_theta_properties():
    rng = np.random.default_rng(8)
    ok = True
    worst = 0.0
    for genus in (1, 2, 3, 4, 5):
        A = rng.normal(size=(genus, genus))
        X = A @ A.T + genus * np.eye(genus)
        B = rng.normal(size=(genus, genus))
        ctx = ThetaContext(0.3 * (B + B.T) + 0.4j * X)
        for _ in range(3):
            s = rng.normal(size=genus) + 0.3j * rng.normal(size=genus)
            v = ctx.theta(s)
            worst = max(worst, abs(ctx.theta(-s) - v) / abs(v))
            shift = rng.integers(-2, 3, size=genus).astype(float)
            worst = max(worst, abs(ctx.theta(s + shift) - v) / abs(v))
            M = rng.integers(-1, 2, size=genus).astype(float)
            worst = max(worst, ctx.quasi_shift_residual(s, M))
    ok &= worst < 1e-9
    ctx2 = ThetaContext(1j * np.eye(2))
    m = np.arange(-60, 61)
    jacobi = float(np.sum(np.exp(-np.pi * m ** 2)))
    jac_err = abs(ctx2.theta(np.zeros(2)) - jacobi ** 2)
    ok &= jac_err < 1e-10
    _line(6, ok, f"worst symmetry/periodicity residual {worst:.1e}, "
          f"genus-2 Jacobi oracle diff {jac_err:.1e}")


def test_criterion_7_riemann_hilbert(reference_setups):
    ok = True
    notes = []
    for label, (_, curve) in zip(("genus1", "genus3"), reference_setups):
        sol = rh.build_rh(curve, 2.0)
        jumps = rh.jump_residuals(sol, samples_per_cut=3, delta=1e-6)
        wie = rh.wiener_hopf_residuals(sol, n_samples=32)
        norm = rh.normalization_at_infinity(sol)
        det = rh.det_s_vs_g(sol, n_samples=16)
        ok &= jumps["max"] < 1e-5
        ok &= wie["u_factorization"] < 1e-6 and wie["v_factorization"] < 1e-6
        ok &= norm["u_minus_minus_identity"] < 1e-7
        ok &= norm["theta_diag_vs_constants"] < 1e-7
        ok &= det["rel_spread"] < 1e-7
        notes.append(f"{label} jumps {jumps['max']:.1e}, WH "
                     f"{wie['u_factorization']:.1e}, inf-normalization "
                     f"{norm['u_minus_minus_identity']:.1e}, theta-diag "
                     f"{norm['theta_diag_vs_constants']:.1e}, detS/g "
                     f"{det['rel_spread']:.1e}")
    _line(7, ok, "; ".join(notes))


def test_criterion_8_beta_squared_integral():
    val, err = quad(lambda l: (complex(beta_function(l)) ** 2).real,
                    1.0, np.inf, limit=500)
    diff = abs(val + 1.0 / 6.0)
    _line(8, diff < 1e-9, f"int beta^2 = {val:.12f}, |diff to -1/6| = {diff:.1e}")


def test_criterion_9_determinant_identity(reference_setups):
    sym, _ = reference_setups[0]
    worst = 0.0
    for L in (1, 2, 4, 8, 16, 24, 32):
        spec = spectrum_for_block(sym, L)
        for lam in (-2.0, -1.5, 1.5, 2.0, 3.0):
            d1 = toeplitz_determinant_spectral(spec, lam)
            d2 = toeplitz_determinant_direct(sym, lam, L)
            worst = max(worst, abs(d1 - d2) / abs(d2))
    _line(9, worst < 1e-8, f"spectral vs direct LU determinant, worst rel "
          f"{worst:.1e} over L<=32 and a lambda grid")


def test_criterion_10_endpoint_behavior(reference_setups):
    ok = True
    notes = []
    for label, (_, curve) in zip(("genus1", "genus3"), reference_setups):
        out = endpoint_behavior(curve)
        ok &= out["rel_error"] < 0.02
        notes.append(f"{label} fitted {out['fitted']:.4f} vs target "
                     f"{out['target']:.4f} (rel {out['rel_error']:.2%})")
    _line(10, ok, "; ".join(notes))
