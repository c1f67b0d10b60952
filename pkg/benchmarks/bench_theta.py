"""Benchmark the theta lattice-sum backends (numba kernel vs numpy einsum).

The lattice sum dominates the asymptotic engine's runtime: every entropy
quadrature node costs a few genus-g theta evaluations.  Run:

    python3 benchmarks/bench_theta.py
"""

import os
import time

import numpy as np

from spinchain_entropy.theta import ThetaContext


def make_context(genus: int, seed: int = 3) -> ThetaContext:
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(genus, genus))
    X = A @ A.T + genus * np.eye(genus)
    B = rng.normal(size=(genus, genus))
    return ThetaContext(0.25 * (B + B.T) + 0.35j * X)


def workload(ctx: ThetaContext, n_args: int, seed: int = 5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (rng.normal(size=(n_args, ctx.g))
            + 0.4j * rng.normal(size=(n_args, ctx.g)))


def run(genus: int = 3, n_args: int = 512, repeats: int = 5):
    ctx = make_context(genus)
    S = workload(ctx, n_args)
    results = {}
    for name in ("numpy", "numba"):
        os.environ["CHAINENT_BACKEND"] = name
        try:
            vals = ctx.log_theta_many(S)  # warm-up (JIT compile, lattice build)
        except Exception as ex:
            print(f"{name}: unavailable ({ex})")
            continue
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            vals = ctx.log_theta_many(S)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, vals)
        lattice_pts = len(ctx._lattice)
        print(f"{name:6s}: genus {genus}, {n_args} args, {lattice_pts} lattice "
              f"points: {best * 1e3:8.2f} ms  ({n_args / best:,.0f} evals/s)")
    os.environ.pop("CHAINENT_BACKEND", None)
    if len(results) == 2:
        diff = np.max(np.abs(results["numpy"][1] - results["numba"][1]))
        speed = results["numpy"][0] / results["numba"][0]
        print(f"agreement |numpy - numba| = {diff:.3e}; numba speedup x{speed:.2f}")


if __name__ == "__main__":
    for g, n in ((1, 2048), (3, 512), (5, 128)):
        run(genus=g, n_args=n)
        print()
