"""Batch CLI: scans, curve dumps and verification reports.

Numeric tables are CSV with 17-significant-digit floats (round-trip exact);
structured dumps are JSON with complex numbers as [re, im] pairs.  Scans are
deterministic: fixed node counts, ordered writes; ENTROPY_NUM_THREADS only
parallelizes independent scan points.

Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 critical symbol.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics, exact, rh
from .curve import build_curve
from .errors import ConfigError, CriticalSymbol, SpinChainError
from .model import make_xx_model, make_xy_model, model_from_dict
from .symbol import build_symbol

_FMT = "%.17g"


def _fmt(x) -> str:
    return _FMT % float(x)


def _c(x) -> list:
    x = complex(x)
    return [x.real, x.imag]


def _model_from_args(args) -> "ChainModel":
    if args.model:
        with open(args.model) as fh:
            return model_from_dict(json.load(fh))
    if args.preset:
        if args.preset == "xy":
            if args.alpha is None:
                raise ConfigError("--preset xy needs --alpha")
            return make_xy_model(args.alpha, args.gamma or 0.0)
        if args.preset == "xx":
            if args.alpha is None:
                raise ConfigError("--preset xx needs --alpha")
            return make_xx_model(args.alpha)
        raise ConfigError(f"unknown preset {args.preset!r}")
    if args.a:
        spec = {"a": [float(x) for x in args.a.split(",")],
                "b": [float(x) for x in args.b.split(",")] if args.b else [],
                "gamma": args.gamma if args.gamma is not None else 1.0}
        return model_from_dict(spec)
    raise ConfigError("specify a model: --model FILE, --preset ..., or --a/--b")


def _add_model_args(p):
    p.add_argument("--model", help="JSON model file")
    p.add_argument("--preset", choices=["xy", "xx"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--a", help="comma-separated couplings a(0..n)")
    p.add_argument("--b", help="comma-separated couplings b(1..n)")


def _int_range(spec: str):
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) == 3:
        lo, hi, step = (int(x) for x in parts)
        return list(range(lo, hi + 1, step))
    raise ConfigError(f"bad range {spec!r}; use start:stop:step")


def _float_path(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"bad path {spec!r}; use start:stop:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    return list(np.linspace(lo, hi, count))


def _pool_map(fn, items):
    workers = int(os.environ.get("ENTROPY_NUM_THREADS", "1"))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_rows(path, header, rows):
    out = sys.stdout if path in (None, "-") else open(path, "w")
    try:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _emit_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# ----- subcommands -----------------------------------------------------------

def cmd_entropy(args) -> int:
    model = _model_from_args(args)
    methods = args.method.split(",")
    results = []
    sym_exact = build_symbol(model, allow_critical=True)
    curve = None
    for method in methods:
        if method == "exact":
            val = exact.entropy_exact(sym_exact, args.L)
            results.append({"value": val, "method": "exact",
                            "diagnostics": {"L": args.L}})
        elif method in ("theta", "series"):
            sym = build_symbol(model)
            curve = curve or build_curve(sym)
            if method == "theta":
                est = asymptotics.entropy_theta(curve)
            else:
                est = asymptotics.xy_series_entropy(curve)
            results.append({"value": est.value, "method": est.method,
                            "diagnostics": est.diagnostics})
        elif method == "critical":
            est = asymptotics.critical_entropy_estimate(sym_exact)
            results.append({"value": est.value, "method": est.method,
                            "diagnostics": est.diagnostics})
        else:
            raise ConfigError(f"unknown method {method!r}")
    _emit_json(args.output, results if len(results) > 1 else results[0])
    return 0


def cmd_entropy_scan(args) -> int:
    model = _model_from_args(args)
    methods = args.method.split(",")
    Ls = _int_range(args.L)
    sym = build_symbol(model, allow_critical="exact" in methods and len(methods) == 1)
    theta_value = None
    if "theta" in methods:
        theta_value = asymptotics.entropy_theta(build_curve(sym)).value

    def one(L):
        row = [str(L)]
        s_exact = None
        if "exact" in methods:
            s_exact = exact.entropy_exact(sym, L)
            row.append(_fmt(s_exact))
        if theta_value is not None:
            row.append(_fmt(theta_value))
            if s_exact is not None:
                row.append(_fmt(abs(s_exact - theta_value)))
        return row

    header = ["L"]
    if "exact" in methods:
        header.append("S_exact")
    if "theta" in methods:
        header.append("S_theta")
        if "exact" in methods:
            header.append("abs_diff")
    _write_rows(args.output, header, _pool_map(one, Ls))
    return 0


def cmd_determinant_scan(args) -> int:
    model = _model_from_args(args)
    sym = build_symbol(model)
    curve = build_curve(sym)

    if args.lambda_grid:
        L = _int_range(args.L)[0] if args.L else 32
        lams = _float_path(args.lambda_grid)

        def one(lam):
            ld = exact.toeplitz_logdet_direct(sym, lam, L)
            la = asymptotics.log_determinant_asymptotic(curve, lam, L)
            return [_fmt(lam), _fmt(ld.real), _fmt(ld.imag), _fmt(la.real),
                    _fmt(la.imag), _fmt(abs(np.exp(ld - la) - 1.0))]

        header = ["lambda", "logD_direct_re", "logD_direct_im",
                  "logD_asymptotic_re", "logD_asymptotic_im", "ratio_minus_1"]
        _write_rows(args.output, header, _pool_map(one, lams))
        return 0

    if not args.L:
        raise ConfigError("determinant-scan needs --L or --lambda-grid")
    Ls = _int_range(args.L)
    lam = args.lam

    def one(L):
        ld = exact.toeplitz_logdet_direct(sym, lam, L)
        la = asymptotics.log_determinant_asymptotic(curve, lam, L)
        ratio_err = abs(np.exp(ld - la) - 1.0)
        return [str(L), _fmt(ld.real), _fmt(ld.imag), _fmt(la.real),
                _fmt(la.imag), _fmt(ratio_err)]

    header = ["L", "logD_direct_re", "logD_direct_im",
              "logD_asymptotic_re", "logD_asymptotic_im", "ratio_minus_1"]
    _write_rows(args.output, header, _pool_map(one, Ls))
    return 0


def cmd_critical_scan(args) -> int:
    if not args.preset == "xy":
        raise ConfigError("critical-scan supports --preset xy")
    gamma = args.gamma if args.gamma is not None else 0.5
    alphas = _float_path(args.alpha_path)
    L = args.L

    def one(alpha):
        model = make_xy_model(alpha, gamma)
        sym = build_symbol(model, allow_critical=True)
        s = exact.entropy_exact(sym, L)
        try:
            est = asymptotics.critical_entropy_estimate(sym)
            est_val, pairs = est.value, est.diagnostics["pairs"]
        except SpinChainError:
            est_val, pairs = float("nan"), 0
        return [_fmt(alpha), _fmt(sym.crit_distance), _fmt(s),
                _fmt(est_val), str(pairs)]

    header = ["alpha", "crit_distance", "S_exact", "divergence_estimate", "pairs"]
    _write_rows(args.output, header, _pool_map(one, alphas))
    return 0


def cmd_dump_curve(args) -> int:
    model = _model_from_args(args)
    sym = build_symbol(model)
    curve = build_curve(sym)
    payload = {
        "lambda_ordering": [_c(x) for x in curve.lam],
        "reciprocal_family": [bool(b) for b in sym.is_recip],
        "transposed": sym.transposed,
        "crit_distance": sym.crit_distance,
        "genus": curve.genus,
        "Pi": [[_c(x) for x in row] for row in curve.Pi],
        "tau_half": [_c(x) for x in curve.tau_half],
        "kappa": [_c(x) for x in curve.kappa],
        "riemann_constant": [_c(x) for x in curve.riemann_constant],
        "e_vector": list(curve.e_vector),
        "diagnostics": {k: v for k, v in curve.diagnostics.items()
                        if isinstance(v, (int, float, bool, list, str))},
    }
    _emit_json(args.output, payload)
    return 0


def cmd_verify_rh(args) -> int:
    model = _model_from_args(args)
    sym = build_symbol(model)
    curve = build_curve(sym)
    report = rh.full_report(curve, args.lam)
    payload = {
        "lambda": args.lam,
        "jump_residuals": {str(k): v for k, v in report["jumps"].items()},
        "wiener_hopf": report["wiener_hopf"],
        "normalization_at_infinity": report["normalization"],
        "det_s_over_g_rel_spread": report["det_s_vs_g"]["rel_spread"],
        "base_point_exponent": report["base_point_exponent"],
        "nonvanishing_min_ratio": report["nonvanishing"]["min_ratio"],
    }
    _emit_json(args.output, payload)
    ok = (report["jumps"]["max"] < 1e-5
          and report["wiener_hopf"]["u_factorization"] < 1e-6
          and report["normalization"]["u_minus_minus_identity"] < 1e-7
          and report["det_s_vs_g"]["rel_spread"] < 1e-7)
    return 0 if ok else 3


def cmd_check(args) -> int:
    model = _model_from_args(args)
    failures = 0

    def report(name, ok, detail=""):
        nonlocal failures
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {name}{(': ' + detail) if detail else ''}")

    sym = build_symbol(model, allow_critical=True)
    lamset = np.sort_complex(np.concatenate([sym.roots, 1.0 / sym.roots]))
    report("branch points = roots and reciprocals",
           np.allclose(np.sort_complex(sym.lam), lamset, atol=1e-10))
    gv = sym.eval_g_circle(np.linspace(0.1, 6.2, 64))
    report("symbol unimodular on circle", float(np.max(np.abs(np.abs(gv) - 1))) < 1e-12)

    spec = exact.spectrum_for_block(sym, 16)
    report("nu spectrum in [0, 1]", bool(np.all(spec.nu <= 1.0) and np.all(spec.nu >= 0)))
    lam_val = 1.7
    d_spec = exact.toeplitz_determinant_spectral(spec, lam_val)
    d_dir = exact.toeplitz_determinant_direct(sym, lam_val, 16)
    report("spectral vs direct determinant",
           abs(d_spec - d_dir) / abs(d_dir) < 1e-8, f"rel {abs(d_spec-d_dir)/abs(d_dir):.2e}")

    if sym.crit_distance >= sym.crit_tol:
        curve = build_curve(sym)
        d = curve.diagnostics
        report("period matrix symmetric", d["pi_asymmetry"] < 1e-9)
        report("Im(Pi) positive definite", min(d["im_pi_eigs"]) > 1e-10)
        report("kappa equals abel map at infinity",
               min(d["kappa_residual_exact"], d["kappa_residual_mod_lattice"]) < 1e-8)
        report("branch-point images are half periods",
               d["half_period_residual"] < 1e-8)
        ctx = curve.theta_ctx
        sc = abs(ctx.theta(np.zeros(curve.genus)))
        odd = [abs(ctx.theta(curve.half_period_value(i))) / sc
               for i in range(2, len(curve.lam) - 1, 2)]
        even = [abs(ctx.theta(curve.half_period_value(i))) / sc
                for i in range(1, len(curve.lam), 2)]
        report("theta vanishes at odd branch points",
               max(odd) < 1e-8 and min(even) > 1e-6)
        if curve.standard_configuration:
            est = asymptotics.entropy_theta(curve)
            s_exact = exact.entropy_exact(sym, 128)
            report("exact vs theta entropy", abs(est.value - s_exact) < 1e-6,
                   f"|diff| {abs(est.value - s_exact):.2e}")
    else:
        print("SKIP curve invariants (critical symbol)")

    print(f"{'OK' if failures == 0 else 'FAILED'} ({failures} failures)")
    return 0 if failures == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chainent",
        description="Entanglement entropy of finite-range quadratic chains: "
                    "exact correlation-matrix engine and theta-function asymptotics.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="single entropy value as JSON")
    _add_model_args(p)
    p.add_argument("--method", default="exact",
                   help="exact|theta|series|critical (comma-separated)")
    p.add_argument("--L", type=int, default=128, help="block length for exact")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("entropy-scan", help="CSV of S over a block-length range")
    _add_model_args(p)
    p.add_argument("--L", required=True, help="range start:stop:step")
    p.add_argument("--method", default="exact,theta")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_entropy_scan)

    p = sub.add_parser("determinant-scan",
                       help="CSV comparing direct and asymptotic determinants")
    _add_model_args(p)
    p.add_argument("--L", help="range start:stop:step (or single L with a grid)")
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--lambda-grid", dest="lambda_grid",
                   help="sweep lambda instead: start:stop:count")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_determinant_scan)

    p = sub.add_parser("critical-scan",
                       help="CSV of exact entropy along a near-critical path")
    _add_model_args(p)
    p.add_argument("--alpha-path", required=True, help="start:stop:count")
    p.add_argument("--L", type=int, default=256)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_critical_scan)

    p = sub.add_parser("dump-curve", help="JSON dump of the curve data")
    _add_model_args(p)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_dump_curve)

    p = sub.add_parser("verify-rh", help="factorization verification report")
    _add_model_args(p)
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_verify_rh)

    p = sub.add_parser("check", help="run the invariant suite on one model")
    _add_model_args(p)
    p.set_defaults(func=cmd_check)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return 2 if ex.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return 2
    except CriticalSymbol as ex:
        print(f"critical symbol: {ex}", file=sys.stderr)
        return 4
    except SpinChainError as ex:
        print(f"numerical failure: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
