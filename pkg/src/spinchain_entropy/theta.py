"""Genus-g Riemann theta function: lattice sum with ellipsoidal truncation.

Arguments are first reduced modulo the (1, Pi) lattice so the remaining sum
is well conditioned; the removed quasi-periodicity factor is returned in log
form, which keeps huge values (arguments far off the real axis) finite.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import TruncationOverflow, ZeroOnPath

_MAX_LATTICE_POINTS = 10_000_000
_TAIL_EXPONENT = 46.0  # e^-46 ~ 1e-20 per-term bound before multiplicity


class ThetaContext:
    """Precomputed data for theta sums with a fixed period matrix."""

    def __init__(self, Pi: np.ndarray):
        Pi = np.asarray(Pi, dtype=complex)
        if Pi.ndim != 2 or Pi.shape[0] != Pi.shape[1]:
            raise ValueError("Pi must be a square matrix")
        self.Pi = Pi
        self.g = Pi.shape[0]
        X = Pi.imag
        X = 0.5 * (X + X.T)
        evals = np.linalg.eigvalsh(X)
        if evals[0] <= 1e-10:
            raise TruncationOverflow(
                f"Im Pi lowest eigenvalue {evals[0]:.3e} too small (near-critical)")
        self.im_pi = X
        self.min_im_eig = float(evals[0])
        self.im_inv = np.linalg.inv(X)
        self._lattice = None      # (Np, g) float64, sorted by pi*n.X.n
        self._lattice_r2 = None   # pi * n.X.n per point
        self._qn = None           # exp(i pi n.Pi.n)
        self._radius2 = 0.0

    # ----- lattice management ----------------------------------------------

    def _ensure_lattice(self, r2: float):
        """Grow the cached lattice to cover pi n.X.n <= r2."""
        if r2 <= self._radius2 and self._lattice is not None:
            return
        X = self.im_pi
        # bounding box |n_i| <= r * sqrt((X^-1)_ii / pi)
        r = np.sqrt(r2)
        half = np.floor(r * np.sqrt(np.diag(self.im_inv) / np.pi)).astype(int) + 1
        count = np.prod(2.0 * half + 1.0)
        if count > _MAX_LATTICE_POINTS:
            raise TruncationOverflow(
                f"lattice bounding box needs {count:.3e} points")
        axes = [np.arange(-h, h + 1) for h in half]
        grids = np.meshgrid(*axes, indexing="ij")
        n = np.stack([gr.ravel() for gr in grids], axis=1).astype(float)
        quad = np.pi * np.einsum("pi,ij,pj->p", n, X, n)
        keep = quad <= r2
        n = n[keep]
        quad = quad[keep]
        order = np.argsort(quad, kind="stable")
        n = n[order]
        quad = quad[order]
        if len(n) > _MAX_LATTICE_POINTS:
            raise TruncationOverflow(f"{len(n)} lattice points exceed the cap")
        self._lattice = np.ascontiguousarray(n)
        self._lattice_r2 = quad
        phase = 1j * np.pi * np.einsum("pi,ij,pj->p", n, self.Pi, n)
        self._qn = np.exp(phase)
        self._radius2 = r2

    def _radius_for(self, cf: float) -> float:
        """pi n.X.n cutoff so the tail is below e^-_TAIL_EXPONENT.

        Per-term bound exp(-pi n.X.n + 2 pi cf sqrt(n.X.n / pi) * sqrt(pi))
        with cf = max sqrt(Im s . X^-1 . Im s) over the batch.
        """
        r = cf + np.sqrt(cf * cf + _TAIL_EXPONENT / np.pi)
        return np.pi * r * r

    # ----- argument reduction ----------------------------------------------

    def reduce(self, s: np.ndarray):
        """Split s = s_red + m + Pi q; return (s_red, log-factor).

        theta(s) = exp(logfac) * theta(s_red) with
        logfac = 2 pi i (-q.s_red - q.Pi.q/2).
        """
        s = np.atleast_2d(np.asarray(s, dtype=complex))
        q = np.rint(s.imag @ self.im_inv.T)
        s_shift = s - q @ self.Pi.T
        m = np.rint(s_shift.real)
        s_red = s_shift - m
        logfac = 2j * np.pi * (-np.einsum("mi,mi->m", q, s_red)
                               - 0.5 * np.einsum("mi,ij,mj->m", q, self.Pi, q))
        return s_red, logfac

    # ----- evaluation -------------------------------------------------------

    def theta_many(self, S: np.ndarray) -> np.ndarray:
        """theta at each row of S (plain values; may overflow for wild S)."""
        return np.exp(self.log_theta_many(S))

    def theta(self, s) -> complex:
        return complex(self.theta_many(np.atleast_2d(s))[0])

    def log_theta_many(self, S: np.ndarray) -> np.ndarray:
        """log theta, principal branch per point plus exact reduction factor."""
        S = np.atleast_2d(np.asarray(S, dtype=complex))
        s_red, logfac = self.reduce(S)
        cf = 0.0
        if len(s_red):
            cf = float(np.sqrt(np.max(
                np.einsum("mi,ij,mj->m", s_red.imag, self.im_inv, s_red.imag))))
        self._ensure_lattice(self._radius_for(cf))
        vals = backend.theta_sum(self._lattice, self._qn, s_red)
        return np.log(vals) + logfac

    def log_theta(self, s) -> complex:
        return complex(self.log_theta_many(np.atleast_2d(s))[0])

    def theta_char(self, eps: np.ndarray, delta: np.ndarray, s) -> complex:
        """Theta with characteristics via the shifted plain theta."""
        eps = np.asarray(eps, dtype=float)
        delta = np.asarray(delta, dtype=float)
        s = np.asarray(s, dtype=complex).reshape(self.g)
        pref = np.exp(2j * np.pi * (eps @ self.Pi @ eps / 8.0
                                    + 0.5 * eps @ s + 0.25 * eps @ delta))
        return pref * self.theta(s + delta / 2.0 + self.Pi @ eps / 2.0)

    def quasi_shift_residual(self, s, M: np.ndarray) -> float:
        """Relative residual of theta(s + Pi M) against the exact factor."""
        s = np.asarray(s, dtype=complex).reshape(self.g)
        M = np.asarray(M, dtype=float)
        lhs = self.theta(s + self.Pi @ M)
        fac = np.exp(2j * np.pi * (-(M @ s) - 0.5 * M @ self.Pi @ M))
        rhs = fac * self.theta(s)
        return float(abs(lhs - rhs) / max(abs(rhs), 1e-300))

    # ----- continuous log along a path --------------------------------------

    def log_theta_path(self, s_of_t, t_nodes, max_depth: int = 30,
                       zero_rtol: float = 1e-12):
        """Branch-continuous log theta along s(t) sampled at t_nodes.

        Nodes are refined until consecutive phase jumps are below pi/2; the
        2 pi i winding is accumulated.  Raises ZeroOnPath when |theta| falls
        below ``zero_rtol`` times the path maximum.
        """
        t = [float(x) for x in t_nodes]
        if len(t) < 2:
            raise ValueError("need at least two path nodes")
        logs = list(self.log_theta_many(np.array([s_of_t(x) for x in t])))

        def refine(i, depth):
            if depth > max_depth:
                raise ZeroOnPath("phase unwrapping failed to converge "
                                 "(theta zero near the path?)")
            dphi = logs[i + 1].imag - logs[i].imag
            dphi -= 2 * np.pi * np.rint(dphi / (2 * np.pi))
            if abs(dphi) < np.pi / 2:
                return
            tm = 0.5 * (t[i] + t[i + 1])
            lm = self.log_theta(s_of_t(tm))
            t.insert(i + 1, tm)
            logs.insert(i + 1, lm)
            refine(i + 1, depth + 1)
            refine(i, depth + 1)

        i = 0
        while i < len(t) - 1:
            refine(i, 0)
            i += 1

        # accumulate windings so the imaginary part is continuous
        out = [logs[0]]
        total = 0.0
        for i in range(1, len(logs)):
            dphi = logs[i].imag - logs[i - 1].imag
            total -= 2 * np.pi * np.rint(dphi / (2 * np.pi))
            out.append(logs[i] + 1j * total)

        mags = np.array([v.real for v in out])
        if np.max(mags) - np.min(mags) > 0 and np.min(np.exp(mags - np.max(mags))) < zero_rtol:
            raise ZeroOnPath("theta magnitude dips below threshold along path")
        return np.array(t), np.array(out)
