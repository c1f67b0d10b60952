"""Finite-L ground truth: Fourier coefficients, correlation matrix,
nu-spectrum, block entropy and the block-Toeplitz determinant two ways.

The 2L x 2L correlation matrix has antisymmetric blocks
[[0, g_{j-k}], [-g_{k-j}, 0]] built from the Fourier coefficients of the
unimodular circle symbol; the block-Toeplitz matrix of the full symbol is
i*lambda*I plus that matrix, so its determinant factors over the paired
singular values nu_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import (CriticalSymbol, DomainError, PairingFailure,
                     TailTooLarge, ZeroMode)
from .model import ChainModel
from .symbol import SymbolData, build_symbol

_GRID_CONVERGENCE = 1e-13
_MAX_GRID = 1 << 22


@dataclass(frozen=True)
class SpectrumResult:
    """Paired correlation-matrix magnitudes nu_j in [0, 1], descending."""
    L: int
    nu: np.ndarray


def fourier_coefficients(symbol: SymbolData, max_index: int,
                         grid: int | None = None,
                         tail_tol: float | None = 1e-12) -> np.ndarray:
    """Fourier coefficients g_l, l = -max_index..max_index, of g on the circle.

    Uniform-grid DFT with automatic grid doubling until two consecutive grids
    agree; for an analytic symbol the aliasing error decays geometrically.
    ``tail_tol=None`` skips the tail gate (finite-L work needs no small tail).
    """
    if grid is None:
        grid = 256
        while grid < 8 * max(1, max_index):
            grid *= 2
    if grid & (grid - 1):
        raise ValueError("grid must be a power of two")

    def dft_coeffs(G):
        theta = 2 * np.pi * np.arange(G) / G
        gv = symbol.eval_g_circle(theta)
        c = np.fft.fft(gv) / G  # c[l] = (1/G) sum g(theta_k) e^{-i l theta_k}
        idx = np.concatenate([np.arange(-max_index, 0) + G, np.arange(0, max_index + 1)])
        return c[idx]  # order l = -max..max

    prev = dft_coeffs(grid)
    while True:
        grid *= 2
        if grid > _MAX_GRID:
            raise TailTooLarge("Fourier grid exceeded maximum without converging")
        cur = dft_coeffs(grid)
        if np.max(np.abs(cur - prev)) <= _GRID_CONVERGENCE:
            break
        prev = cur

    imag_resid = float(np.max(np.abs(cur.imag)))
    if imag_resid > 1e-12:
        raise TailTooLarge(f"imaginary residue {imag_resid:.3e} in Fourier coefficients")
    g = cur.real
    if tail_tol is not None:
        tail = max(abs(g[0]), abs(g[-1]))
        if tail > tail_tol:
            raise TailTooLarge(
                f"|g_(+-{max_index})| = {tail:.3e} above tail_tol={tail_tol:.1e}; "
                "raise max_index")
    return g


def _symbol_is_real(symbol: SymbolData) -> bool:
    model = symbol.model
    return model.gamma == 0.0 or all(bj == 0.0 for bj in model.b)


def fourier_coefficients_sign_symbol(symbol: SymbolData,
                                     max_index: int) -> np.ndarray:
    """Exact coefficients when g = sign(q) on the circle (gamma*b = 0).

    The symbol is piecewise +-1 with jumps where q(e^{i theta}) = 0; the
    coefficients follow in closed form from the sign pattern, which is the
    only route at criticality (the DFT cannot converge through a jump).
    """
    if not _symbol_is_real(symbol):
        raise CriticalSymbol(
            "analytic Fourier path needs a real symbol (gamma*b = 0)")
    # q(e^{i theta}) is an even trig polynomial: a(0) + 2 sum a(j) cos(j theta)
    model = symbol.model
    n = model.n
    # breakpoints: zeros of Q(x) = sum_j c_j T_j-free form; evaluate on theta
    theta_fine = np.linspace(0.0, np.pi, 20001)
    qv = np.real(np.asarray(symbol.q(np.exp(1j * theta_fine)), dtype=complex))
    signs = np.sign(qv)
    signs[signs == 0] = 1
    crossings = np.nonzero(np.diff(signs))[0]
    breaks = [0.0]
    for i in crossings:
        lo, hi = theta_fine[i], theta_fine[i + 1]
        for _ in range(80):  # bisection
            mid = 0.5 * (lo + hi)
            if np.sign(np.real(symbol.q(np.exp(1j * mid)))) == signs[i]:
                lo = mid
            else:
                hi = mid
        breaks.append(0.5 * (lo + hi))
    breaks.append(np.pi)
    seg_signs = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        mid = 0.5 * (lo + hi)
        seg_signs.append(1.0 if np.real(symbol.q(np.exp(1j * mid))) > 0 else -1.0)

    ls = np.arange(1, max_index + 1)
    g_pos = np.zeros(max_index)
    g0 = 0.0
    for (lo, hi), s in zip(zip(breaks[:-1], breaks[1:]), seg_signs):
        g0 += s * (hi - lo) / np.pi
        g_pos += s * (np.sin(ls * hi) - np.sin(ls * lo)) / (np.pi * ls)
    return np.concatenate([g_pos[::-1], [g0], g_pos])  # even in l


def fourier_coefficients_auto(symbol: SymbolData, max_index: int) -> np.ndarray:
    """Fourier coefficients for any symbol; analytic at real criticality."""
    if symbol.crit_distance < symbol.crit_tol:
        if _symbol_is_real(symbol):
            return fourier_coefficients_sign_symbol(symbol, max_index)
        raise CriticalSymbol(
            "critical symbol with complex phase: Fourier coefficients decay "
            "too slowly for the finite-L engine")
    return fourier_coefficients(symbol, max_index, tail_tol=None)


def build_correlation_matrix(g_l: np.ndarray, L: int) -> np.ndarray:
    """2L x 2L antisymmetric matrix with blocks [[0, g_{j-k}], [-g_{k-j}, 0]].

    ``g_l`` holds coefficients l = -m..m (ascending); needs m >= L-1.
    """
    m = (len(g_l) - 1) // 2
    if 2 * m + 1 != len(g_l):
        raise ValueError("g_l must have odd length (l = -m..m)")
    if m < L - 1:
        raise ValueError("need coefficients up to |l| = L-1")
    jk = np.arange(L)
    T = g_l[(jk[:, None] - jk[None, :]) + m]  # T[j,k] = g_{j-k}
    C = np.zeros((2 * L, 2 * L))
    C[0::2, 1::2] = T
    C[1::2, 0::2] = -T.T
    return C


def spectrum(C: np.ndarray) -> SpectrumResult:
    """Paired singular values of the antisymmetric correlation matrix."""
    if C.shape[0] != C.shape[1] or C.shape[0] % 2:
        raise ValueError("correlation matrix must be even-dimensional square")
    if np.max(np.abs(C + C.T)) > 1e-12 * max(1.0, np.max(np.abs(C))):
        raise PairingFailure("matrix is not antisymmetric")
    L = C.shape[0] // 2
    if L == 0:
        return SpectrumResult(0, np.zeros(0))
    s = np.linalg.svd(C, compute_uv=False)
    gap = np.abs(s[0::2] - s[1::2])
    if np.max(gap) > 1e-8 * max(1.0, s[0]):
        raise PairingFailure(f"singular values fail to pair (gap {np.max(gap):.3e})")
    nu = 0.5 * (s[0::2] + s[1::2])
    if np.any(nu > 1.0 + 1e-10):
        raise PairingFailure(f"nu above 1: {np.max(nu):.12f}")
    return SpectrumResult(L, np.clip(nu, 0.0, 1.0))


def binary_entropy(x: float, nu: float) -> float:
    """e(x, nu) = -(x+nu)/2 log((x+nu)/2) - (x-nu)/2 log((x-nu)/2), 0 log 0 = 0."""
    if abs(nu) > x:
        raise DomainError(f"|nu|={abs(nu)} exceeds x={x}")
    p, q = (x + nu) / 2.0, (x - nu) / 2.0
    return float(-xlogy(p, p) - xlogy(q, q))


def spectrum_for_block(symbol: SymbolData, L: int) -> SpectrumResult:
    if L == 0:
        return SpectrumResult(0, np.zeros(0))
    g_l = fourier_coefficients_auto(symbol, L - 1 if L > 1 else 1)
    return spectrum(build_correlation_matrix(g_l, L))


def entropy_exact(symbol: SymbolData, L: int) -> float:
    """Block entropy S_L = sum_j e(1, nu_j) in nats."""
    spec = spectrum_for_block(symbol, L)
    return float(sum(binary_entropy(1.0, v) for v in spec.nu))


def toeplitz_determinant_spectral(spec: SpectrumResult, lam: complex) -> complex:
    """D_L(lambda) = (-1)^L prod_j (lambda**2 - nu_j**2)."""
    lam = complex(lam)
    return (-1.0) ** spec.L * complex(np.prod(lam * lam - spec.nu ** 2))


def toeplitz_logdet_spectral(spec: SpectrumResult, lam: complex) -> complex:
    """log D_L with the product taken term-by-term (overflow-safe)."""
    lam = complex(lam)
    terms = np.log((lam * lam - spec.nu.astype(complex) ** 2))
    return complex(np.sum(terms) + spec.L * np.log(-1 + 0j))


def block_toeplitz_matrix(symbol: SymbolData, lam: complex, L: int) -> np.ndarray:
    """Dense 2L x 2L block-Toeplitz matrix of the full symbol."""
    g_l = fourier_coefficients_auto(symbol, max(L - 1, 1))
    C = build_correlation_matrix(g_l, L).astype(complex)
    C[np.diag_indices(2 * L)] += 1j * lam
    return C


def toeplitz_determinant_direct(symbol: SymbolData, lam: complex, L: int) -> complex:
    """det of the block-Toeplitz matrix via LU (np.linalg.det)."""
    return complex(np.linalg.det(block_toeplitz_matrix(symbol, lam, L)))


def toeplitz_logdet_direct(symbol: SymbolData, lam: complex, L: int) -> complex:
    """log det via LU, returned as log|det| + i*arg(sign) (overflow-safe)."""
    sign, logabs = np.linalg.slogdet(block_toeplitz_matrix(symbol, lam, L))
    return complex(logabs + np.log(sign))


def finite_chain_correlation(model: ChainModel, M: int) -> np.ndarray:
    """Circulant M x M ground-state matrix of the closed chain of M sites.

    Built from the phases Lambda_k/|Lambda_k| at the discrete momenta
    k = 2 pi l / M; converges entrywise to the Fourier coefficients of g.
    """
    if M <= 2 * model.n:
        raise ValueError("M must exceed 2n")
    sym = build_symbol(model, allow_critical=True)
    k = 2 * np.pi * np.arange(M) / M
    lam_k = np.asarray(sym.q(np.exp(1j * k)), dtype=complex)
    if np.any(np.abs(lam_k) < 1e-12):
        raise ZeroMode("some |Lambda_k| < 1e-12 (finite-M accidental criticality)")
    u = lam_k / np.abs(lam_k)
    t = np.fft.ifft(u)  # t_d = (1/M) sum_l u_l e^{2 pi i l d / M}
    if np.max(np.abs(t.imag)) > 1e-12:
        raise ZeroMode("finite-chain matrix is not real")
    td = t.real
    j = np.arange(M)
    return td[(j[None, :] - j[:, None]) % M]  # T[j,k] = t_{k-j}
