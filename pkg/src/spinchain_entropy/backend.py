"""Kernel backend selection for the theta lattice sum.

The sum over lattice points is the hot inner loop of the asymptotic engine
(every entropy quadrature node evaluates several genus-g theta series).
Two interchangeable implementations are provided:

* a numba ``@njit`` kernel (default when numba imports cleanly),
* a chunked pure-numpy einsum fallback.

Select explicitly with the environment variable ``CHAINENT_BACKEND`` set to
``numba`` or ``numpy`` (anything else, or unset, means auto).  Results are
identical up to floating-point addition order; both sum in fixed lattice
order per evaluation point.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "CHAINENT_BACKEND"


def _theta_sum_numpy(lattice: np.ndarray, qn: np.ndarray,
                     s_red: np.ndarray) -> np.ndarray:
    """theta(s) = sum_n qn[n] * exp(2 pi i s . n) for each reduced s.

    lattice: (Np, g) float64, qn: (Np,) complex128 = exp(i pi n.Pi.n),
    s_red: (m, g) complex128.  Chunked to bound the (chunk, Np) temporary.
    """
    m = s_red.shape[0]
    out = np.empty(m, dtype=np.complex128)
    chunk = max(1, int(4e6) // max(1, lattice.shape[0]))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        phase = s_red[lo:hi] @ lattice.T  # (c, Np)
        out[lo:hi] = np.exp(2j * np.pi * phase) @ qn
    return out


def _build_numba_kernel():
    from numba import njit

    @njit(cache=True, fastmath=False)
    def _theta_sum_numba(lattice, qn, s_red):  # pragma: no cover - jitted
        m = s_red.shape[0]
        npts = lattice.shape[0]
        g = lattice.shape[1]
        out = np.empty(m, dtype=np.complex128)
        for i in range(m):
            acc = 0.0 + 0.0j
            for p in range(npts):
                dot = 0.0 + 0.0j
                for k in range(g):
                    dot += s_red[i, k] * lattice[p, k]
                acc += qn[p] * np.exp(2j * np.pi * dot)
            out[i] = acc
        return out

    return _theta_sum_numba


_numba_kernel = None
_numba_failed = False


def _resolve(name: str | None):
    global _numba_kernel, _numba_failed
    if name == "numpy":
        return _theta_sum_numpy, "numpy"
    if name in (None, "", "auto", "numba"):
        if _numba_kernel is None and not _numba_failed:
            try:
                _numba_kernel = _build_numba_kernel()
            except Exception:
                _numba_failed = True
                if name == "numba":
                    raise
        if _numba_kernel is not None:
            return _numba_kernel, "numba"
        return _theta_sum_numpy, "numpy"
    raise ValueError(f"unknown backend {name!r}")


def theta_sum(lattice: np.ndarray, qn: np.ndarray, s_red: np.ndarray) -> np.ndarray:
    """Dispatch the lattice sum to the configured backend."""
    fn, _ = _resolve(os.environ.get(_ENV_VAR, "auto").lower())
    return fn(lattice, qn, s_red)


def backend_name() -> str:
    return _resolve(os.environ.get(_ENV_VAR, "auto").lower())[1]
