import numpy as np
import pytest

from spinchain_entropy import rh
from spinchain_entropy.curve import build_curve
from spinchain_entropy.symbol import build_symbol
from util import genus3_reference, genus5_reference, xy_reference


@pytest.fixture(scope="module")
def xy_rh():
    curve = build_curve(build_symbol(xy_reference()))
    return rh.build_rh(curve, 2.0)


@pytest.fixture(scope="module")
def g3_rh():
    curve = build_curve(build_symbol(genus3_reference()))
    return rh.build_rh(curve, 2.0)


def test_jump_residuals(xy_rh, g3_rh):
    for sol in (xy_rh, g3_rh):
        res = rh.jump_residuals(sol, samples_per_cut=3, delta=1e-6)
        assert res["max"] < 1e-5
        # residual shrinks roughly linearly with the straddling offset
        # (points closer than 1e-6 to a cut are rejected by the router)
        res_2 = rh.jump_residuals(sol, samples_per_cut=1, delta=4e-6)
        res_1 = rh.jump_residuals(sol, samples_per_cut=1, delta=2e-6)
        assert res_1["max"] < 0.8 * res_2["max"]


def test_inner_and_outer_jump_matrices(xy_rh):
    J_in = rh._cut_jump_matrix(xy_rh, 0)
    assert np.allclose(J_in, rh._SIGMA1)
    J_out = rh._cut_jump_matrix(xy_rh, 1)
    lam = xy_rh.lam
    expect = np.array([[0, (lam + 1) / (lam - 1)], [(lam - 1) / (lam + 1), 0]])
    assert np.allclose(J_out, expect)


def test_wiener_hopf_products(xy_rh, g3_rh):
    for sol in (xy_rh, g3_rh):
        res = rh.wiener_hopf_residuals(sol, n_samples=32)
        assert res["u_factorization"] < 1e-6
        assert res["v_factorization"] < 1e-6


def test_normalization_at_infinity(xy_rh, g3_rh):
    for sol in (xy_rh, g3_rh):
        res = rh.normalization_at_infinity(sol)
        assert res["u_minus_minus_identity"] < 1e-7
        assert res["s_minus_target"] < 1e-7
        assert res["theta_diag_vs_constants"] < 1e-7


def test_det_s_proportional_to_g(xy_rh, g3_rh):
    for sol in (xy_rh, g3_rh):
        out = rh.det_s_vs_g(sol, n_samples=16)
        assert out["rel_spread"] < 1e-7


def test_base_point_exponent(xy_rh):
    assert abs(rh.base_point_exponent(xy_rh) + 0.5) < 0.01


def test_entries_continuous_across_gaps(xy_rh):
    # the gap between the cuts is not a jump line: values from above and
    # below must agree (this probes path-class consistency of the routed
    # Abel map, Delta and log against each other)
    curve = xy_rh.curve
    zgap = 0.5 * (curve.lam[1] + curve.lam[2])
    up = xy_rh.s_matrix(complex(zgap) + 1e-6j)
    dn = xy_rh.s_matrix(complex(zgap) - 1e-6j)
    assert np.max(np.abs(up - dn)) / np.max(np.abs(up)) < 1e-4


def test_entries_continuous_left_of_base(xy_rh):
    curve = xy_rh.curve
    z0 = curve.lam[0].real - 0.4
    up = xy_rh.s_matrix(complex(z0, 1e-6))
    dn = xy_rh.s_matrix(complex(z0, -1e-6))
    assert np.max(np.abs(up - dn)) / np.max(np.abs(up)) < 1e-4


def test_nonvanishing_along_imaginary_beta(xy_rh, g3_rh):
    for sol in (xy_rh, g3_rh):
        out = rh.verify_nonvanishing(sol.curve)
        assert out["min_ratio"] > 1e-10


def test_full_report_shape(xy_rh):
    rep = rh.full_report(xy_rh.curve, 2.0)
    for key in ("jumps", "wiener_hopf", "normalization", "det_s_vs_g",
                "base_point_exponent", "nonvanishing"):
        assert key in rep


def test_genus5_verification():
    curve = build_curve(build_symbol(genus5_reference()))
    sol = rh.build_rh(curve, 2.0)
    # one cut has length ~0.026 with small clearance, so the straddling
    # discretization limits its jump residual; the sharp checks stay tight
    res = rh.jump_residuals(sol, samples_per_cut=1, delta=1e-6)
    assert res["max"] < 5e-4
    norm = rh.normalization_at_infinity(sol)
    assert norm["u_minus_minus_identity"] < 1e-7
    assert rh.det_s_vs_g(sol, n_samples=8)["rel_spread"] < 1e-7
