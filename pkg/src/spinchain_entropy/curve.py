"""Hyperelliptic curve data: periods, Abel map, Riemann constant, tau, kappa.

The curve is w**2 = prod(z - lambda_i) over the 4n ordered branch points.
Cycles are realized concretely in the plane:

* a_i is a loop around cut i+1 (0-based cuts[i+1]), computed as twice the
  one-sided integral along the cut with the square-root endpoint behaviour
  removed by the Chebyshev substitution;
* b_i runs from the midpoint of cut 0 to the midpoint of cut i+1 through a
  horizontal "highway" above all branch points, doubled (the return leg on
  the second sheet equals the first).

Orientations are not taken from any figure; the single free relative sign
between the a- and b-families is calibrated by requiring Im Pi positive
definite and checked against the independent identity kappa = omega(inf).
All Abel-map values at branch points are computed along the chain of cuts
and gaps and then snapped to half-periods (N + Pi M)/2 with integer N, M;
the Riemann constant and tau/2 are assembled in that exact integer
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (ConvergenceFailure, DegenerateModel, IllConditioned,
                     PathRoutingFailure, QuadratureFailure)
from .symbol import SymbolData, _segment_distance
from .theta import ThetaContext

_NODE_TOL = 1e-11
_MAX_NODES = 1 << 14
_MAX_GL_NODES = 1 << 11  # leggauss beyond 2048 nodes is prohibitively slow
_HALF_PERIOD_TOL = 1e-8


# ----------------------------------------------------------------------------
# plane geometry helpers
# ----------------------------------------------------------------------------

def _orient(a, b, c) -> float:
    return ((b - a).real * (c - a).imag - (b - a).imag * (c - a).real)


def _segments_cross(a1, b1, a2, b2, pad: float = 1e-12) -> bool:
    """True when open segments [a1,b1] and [a2,b2] intersect or nearly touch."""
    d1 = _orient(a2, b2, a1)
    d2 = _orient(a2, b2, b1)
    d3 = _orient(a1, b1, a2)
    d4 = _orient(a1, b1, b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    # near-touching guard
    span = max(abs(b1 - a1), abs(b2 - a2), 1.0)
    eps = pad * span
    return bool(min(_segment_distance(a1, a2, b2), _segment_distance(b1, a2, b2),
                    _segment_distance(a2, a1, b1), _segment_distance(b2, a1, b1)) < eps)


@lru_cache(maxsize=64)
def _gl_rule(N: int):
    x, w = np.polynomial.legendre.leggauss(N)
    return x, w


# ----------------------------------------------------------------------------
# quadrature over segments
# ----------------------------------------------------------------------------

class _Quadrature:
    """Doubling quadrature of vector integrands F(z) along plane segments."""

    def __init__(self, tol: float = _NODE_TOL):
        self.tol = tol

    def _double(self, evaluate, max_nodes: int = _MAX_NODES):
        N = 32
        prev = evaluate(N)
        while True:
            N *= 2
            if N > max_nodes:
                raise QuadratureFailure("node doubling failed to converge")
            cur = evaluate(N)
            scale = 1.0 + float(np.max(np.abs(cur)))
            if float(np.max(np.abs(cur - prev))) <= self.tol * scale:
                return cur
            prev = cur

    def regular(self, F, a, b):
        """Gauss-Legendre on [a, b]; endpoints are never evaluated."""
        a = complex(a)
        b = complex(b)

        def evaluate(N):
            x, w = _gl_rule(N)
            z = a + (b - a) * 0.5 * (x + 1.0)
            vals = F(z, None)
            return np.asarray(vals) @ w * (b - a) * 0.5

        return self._double(evaluate, max_nodes=_MAX_GL_NODES)

    def from_branch(self, F, lam, b, lam_index=None):
        """Segment [lam, b] where lam is a branch point: z = lam + (b-lam)u**2.

        The exact offset z - lam = (b-lam) u**2 is forwarded so square-root
        factors near the endpoint avoid catastrophic cancellation.
        """
        lam = complex(lam)
        b = complex(b)
        d = b - lam

        def evaluate(N):
            x, w = _gl_rule(N)
            u = 0.5 * (x + 1.0)
            z = lam + d * u * u
            offsets = None if lam_index is None else {lam_index: d * u * u}
            vals = np.asarray(F(z, offsets))
            return (vals * (2.0 * d * u)) @ w * 0.5

        return self._double(evaluate, max_nodes=_MAX_GL_NODES)

    def chebyshev(self, F_times_w_reg, a, b, idx_a=None, idx_b=None):
        """Segment [a, b] with branch points at BOTH ends.

        F_times_w_reg(z, jacobian, offsets) must already include the full
        integrand times dz/dt; the midpoint rule in t = acos((z-m)/h) is
        spectrally accurate because the sqrt endpoint singularities cancel
        against sin t.  Exact endpoint offsets 2h cos(t/2)**2, -2h sin(t/2)**2
        are forwarded for precision.
        """
        a = complex(a)
        b = complex(b)
        m = 0.5 * (a + b)
        h = 0.5 * (b - a)

        def evaluate(N):
            t = (np.arange(N) + 0.5) * np.pi / N
            z = m + h * np.cos(t)
            offsets = {}
            if idx_a is not None:
                offsets[idx_a] = 2.0 * h * np.cos(0.5 * t) ** 2
            if idx_b is not None:
                offsets[idx_b] = -2.0 * h * np.sin(0.5 * t) ** 2
            vals = np.asarray(F_times_w_reg(z, h * np.sin(t), offsets or None))
            return vals.sum(axis=-1) * (np.pi / N)

        return self._double(evaluate)


# ----------------------------------------------------------------------------
# curve data
# ----------------------------------------------------------------------------

@dataclass
class CurveData:
    symbol: SymbolData
    lam: np.ndarray
    genus: int
    cuts: list
    Pi: np.ndarray
    basis_coeffs: np.ndarray        # row j: coefficients of P_j (deg <= g-1)
    dDelta_coeffs: np.ndarray       # length 2n, leading entry 1/2
    kappa: np.ndarray
    omega_inf: np.ndarray
    delta0: complex
    half_N: np.ndarray              # (4n, g) integers
    half_M: np.ndarray              # (4n, g) integers
    K_N: np.ndarray
    K_M: np.ndarray
    tau_N: np.ndarray
    tau_M: np.ndarray
    e_vector: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    _ctx: ThetaContext | None = None
    _router: object = None

    # ----- assembled vectors -------------------------------------------------

    def half_period_value(self, i: int) -> np.ndarray:
        return 0.5 * (self.half_N[i] + self.Pi @ self.half_M[i])

    @property
    def riemann_constant(self) -> np.ndarray:
        return 0.5 * (self.K_N + self.Pi @ self.K_M)

    @property
    def tau_half(self) -> np.ndarray:
        return 0.5 * (self.tau_N + self.Pi @ self.tau_M)

    @property
    def theta_ctx(self) -> ThetaContext:
        if self._ctx is None:
            self._ctx = ThetaContext(self.Pi)
        return self._ctx

    @property
    def standard_configuration(self) -> bool:
        return bool(self.diagnostics.get("standard_configuration", False))

    def require_standard(self):
        if not self.standard_configuration:
            raise DegenerateModel(
                "branch-point layout is outside the validated family "
                "(need the first n cuts inside the unit circle and the last "
                "n outside); only the exact engine applies")

    # ----- Abel map / Delta along routed paths ------------------------------

    def _monomial_path_integrals(self, z: complex) -> np.ndarray:
        return self._router.integrate_to(complex(z))

    def abel_map(self, z: complex, sheet: int = 1) -> np.ndarray:
        """omega(z) along a routed path from lambda_1; sheet 2 negates."""
        mono = self._monomial_path_integrals(z)
        val = self.basis_coeffs @ mono[: self.genus]
        return val if sheet == 1 else -val

    def delta_integral(self, z: complex, sheet: int = 1) -> complex:
        """Delta(z) = int_{lambda_1}^z dDelta (odd under the involution)."""
        mono = self._monomial_path_integrals(z)
        val = complex(self.dDelta_coeffs @ mono[: len(self.dDelta_coeffs)])
        return val if sheet == 1 else -val

    def abel_and_delta(self, z: complex, sheet: int = 1):
        mono = self._monomial_path_integrals(z)
        nm = len(self.dDelta_coeffs)
        om = self.basis_coeffs @ mono[: self.genus]
        dl = complex(self.dDelta_coeffs @ mono[:nm])
        if sheet != 1:
            om, dl = -om, -dl
        return om, dl

    def abel_delta_log(self, z: complex):
        """(omega(z), Delta(z), log(z - lambda_1)) along one routed path."""
        mono = self._monomial_path_integrals(z)
        nm = len(self.dDelta_coeffs)
        om = self.basis_coeffs @ mono[: self.genus]
        dl = complex(self.dDelta_coeffs @ mono[:nm])
        return om, dl, complex(mono[-1])

    def lattice_residual(self, v: np.ndarray) -> float:
        """Distance from v to the nearest point of the (1, Pi) lattice."""
        v = np.asarray(v, dtype=complex)
        q = np.rint(np.linalg.solve(self.Pi.imag, v.imag))
        rem = v - self.Pi @ q
        m = np.rint(rem.real)
        return float(np.max(np.abs(rem - m)))


# ----------------------------------------------------------------------------
# path routing
# ----------------------------------------------------------------------------

class _PathRouter:
    """Routes integration paths from lambda_1 to arbitrary points.

    Paths exit lambda_1 away from cut 0, climb to a horizontal highway above
    every branch point through a corridor left of everything, then approach
    the target, detouring around cuts when the plain vertical drop fails.
    """

    def __init__(self, sym: SymbolData, quad: _Quadrature, integrand,
                 with_log: bool = False, base_integrand=None):
        self.sym = sym
        self.quad = quad
        self.integrand = integrand  # F(z) -> (m, len(z)) vector integrand
        self.with_log = with_log
        self.base_integrand = base_integrand or integrand
        lam = sym.lam
        re = lam.real
        im = lam.imag
        spread = max(1.0, float(re.max() - re.min()))
        self.H = float(im.max() + 0.35 * spread + 0.6)
        self.H_low = float(im.min() - 0.35 * spread - 0.6)
        self.x_left = float(re.min() - 0.35 * spread - 0.6)
        self.x_right = float(re.max() + 0.35 * spread + 0.6)
        a, b = sym.cuts[0]
        d0 = (b - a) / abs(b - a)
        clear = self._clearance(0)
        self.exit_len = 0.4 * clear
        self.exit_point = lam[0] - self.exit_len * d0
        self._base_cache = None
        self._cache = {}

    def _clearance(self, cut_idx: int) -> float:
        a, b = self.sym.cuts[cut_idx]
        best = np.inf
        for j, (c, d) in enumerate(self.sym.cuts):
            if j == cut_idx:
                continue
            for p in (c, d, 0.5 * (c + d)):
                best = min(best, float(_segment_distance(p, a, b)))
            for p in (a, b, 0.5 * (a + b)):
                best = min(best, float(_segment_distance(p, c, d)))
        return float(min(best, abs(b - a)))

    def _crosses_cut(self, a, b, skip=()):
        for j, (c, d) in enumerate(self.sym.cuts):
            if j in skip:
                continue
            if _segments_cross(a, b, c, d):
                return True
        return False

    def _base_integrals(self):
        """Integrals of the integrand rows from lambda_1 to (x_left, H).

        The log row (when present) is anchored with its principal value at
        the highway corner: the exit segment from the branch point is
        excluded there because its log integral diverges.
        """
        if self._base_cache is None:
            x0 = self.exit_point
            p_left = complex(self.x_left, x0.imag)
            p_top = complex(self.x_left, self.H)
            lam1 = self.sym.lam[0]
            total = self.quad.from_branch(self.base_integrand, lam1, x0,
                                          lam_index=0)
            if self.with_log:
                total = np.concatenate([total, [0.0]])
            for (a, b) in [(x0, p_left), (p_left, p_top)]:
                if abs(b - a) > 0:
                    if self._crosses_cut(a, b, skip=()):
                        raise PathRoutingFailure("base exit path crosses a cut")
                    total = total + self.quad.regular(self.integrand, a, b)
            if self.with_log:
                # whatever the exit legs accumulated in the log row is
                # discarded: the row is anchored with its principal value here
                total[-1] = np.log(p_top - lam1)
            self._base_cache = (p_top, total)
        return self._base_cache

    def _candidate_tails(self, z: complex):
        """Waypoint lists from (x_left, H) to z.

        Transitions between the upper and lower half planes happen only in
        the corridor right of every branch point.  The third-kind
        differential carries a residue of -+i pi around the whole branch
        set, so the half-plane transition side decides on which lines
        exp(Delta) is discontinuous; the right-side convention puts that
        line on the leftward ray, exactly where the cut-parity square root
        of the matrix entries flips as well, making their product clean.
        """
        zx, zy = z.real, z.imag
        top = complex(self.x_left, self.H)
        if zy >= 0.0:
            return [
                [top, complex(zx, self.H), z],
                [top, complex(self.x_left, max(zy, 0.0)), z],
            ]
        top_r = complex(self.x_right, self.H)
        bot_r = complex(self.x_right, self.H_low)
        return [
            [top, top_r, bot_r, complex(zx, self.H_low), z],
            [top, top_r, complex(self.x_right, zy), z],
        ]

    def _dist_to_cuts(self, z: complex) -> float:
        return min(float(np.min(_segment_distance(z, a, b)))
                   for (a, b) in self.sym.cuts)

    def _waypoint_clearance(self, foot: complex) -> float:
        """Distance from a point on one cut to every other cut."""
        dists = sorted(float(_segment_distance(foot, a, b))
                       for (a, b) in self.sym.cuts)
        return dists[1] if len(dists) > 1 and dists[0] < 1e-12 else dists[0]

    def _leg_clear(self, a: complex, b: complex) -> bool:
        """A leg is integrable when the cuts come close only near endpoints."""
        scale = max(1.0, float(np.max(np.abs(self.sym.lam))))
        ts = np.linspace(0.0, 1.0, 33)[1:-1]
        for t in ts:
            zs = a + (b - a) * t
            d = self._dist_to_cuts(zs)
            if d < 1e-3 * scale and min(abs(zs - a), abs(zs - b)) > 8 * d:
                return False
        return True

    def _leg_pieces(self, a: complex, b: complex):
        """Dyadically graded partition: pieces shrink toward close endpoints
        and stay below a global cap so each piece sees O(1) variation."""
        scale = max(1.0, float(np.max(np.abs(self.sym.lam))))
        L = abs(b - a)
        e = (b - a) / L
        cap = 2.0 * scale
        da = max(min(self._dist_to_cuts(a), cap), 1e-9)
        db = max(min(self._dist_to_cuts(b), cap), 1e-9)
        s_left = [0.0]
        step = 2.0 * da
        while s_left[-1] + step < 0.5 * L:
            s_left.append(s_left[-1] + step)
            step = min(2.0 * step, cap)
        s_right = [0.0]
        step = 2.0 * db
        while s_right[-1] + step < 0.5 * L:
            s_right.append(s_right[-1] + step)
            step = min(2.0 * step, cap)
        # ensure the middle block respects the cap
        mids = []
        lo = s_left[-1]
        hi = L - s_right[-1]
        k = int(np.ceil((hi - lo) / cap))
        for j in range(1, k):
            mids.append(lo + (hi - lo) * j / k)
        ss = s_left + mids + [L - s for s in reversed(s_right)]
        pts = [a + e * s for s in ss[:-1]] + [b]
        return list(zip(pts[:-1], pts[1:]))

    def integrate_leg(self, a: complex, b: complex) -> np.ndarray:
        total = None
        for (p, q) in self._leg_pieces(a, b):
            if abs(q - p) == 0:
                continue
            val = self.quad.regular(self.integrand, p, q)
            total = val if total is None else total + val
        return total

    def integrate_to(self, z: complex) -> np.ndarray:
        z = complex(z)
        key = (z.real, z.imag)
        if key in self._cache:
            return self._cache[key]
        dmin = self._dist_to_cuts(z)
        if dmin < 1e-6 * 0.999999:
            raise PathRoutingFailure(f"target within {dmin:.2e} of a branch cut")
        scale = max(1.0, float(np.max(np.abs(self.sym.lam))))
        if dmin < 0.02 * scale:
            # approach through a waypoint at perpendicular clearance from the
            # nearest cut, so the final leg enters along the cone direction
            best = None
            for (a, b) in self.sym.cuts:
                dist = float(_segment_distance(z, a, b))
                if best is None or dist < best[0]:
                    d = b - a
                    t = np.clip(((z - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
                    foot = a + t * d
                    best = (dist, foot)
            dist, foot = best
            direction = (z - foot) / abs(z - foot)
            w1 = foot + direction * min(0.1 * scale, 0.45 * self._waypoint_clearance(foot))
            if abs(w1 - z) > 2 * dmin:
                total = self.integrate_to(w1) + self.integrate_leg(w1, z)
                self._cache[key] = total
                return total
        p_top, base = self._base_integrals()
        for waypoints in self._candidate_tails(z):
            segs = [(a, b) for (a, b) in zip(waypoints[:-1], waypoints[1:])
                    if abs(b - a) > 0]
            if any(_segments_cross(a, b, c, d)
                   for (a, b) in segs for (c, d) in self.sym.cuts):
                continue
            if not all(self._leg_clear(a, b) for a, b in segs):
                continue
            total = base.copy()
            for (a, b) in segs:
                total = total + self.integrate_leg(a, b)
            self._cache[key] = total
            return total
        raise PathRoutingFailure(f"no crossing-free route to {z}")


# ----------------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------------

def _validate_geometry(sym: SymbolData):
    cuts = sym.cuts
    for i in range(len(cuts)):
        for j in range(i + 1, len(cuts)):
            if _segments_cross(*cuts[i], *cuts[j], pad=1e-9):
                raise DegenerateModel("branch cuts intersect")


class _CurveBuilder:
    def __init__(self, sym: SymbolData, node_tol: float = _NODE_TOL):
        sym.require_noncritical()
        _validate_geometry(sym)
        self.sym = sym
        self.n = sym.model.n
        self.g = sym.genus
        self.lam = sym.lam
        self.cuts = sym.cuts
        self.quad = _Quadrature(node_tol)
        self.n_mono = 2 * self.n  # monomials z^0 .. z^{2n-1}

    # integrand: all monomials z^k / w(z), k = 0..2n-1
    def _w_from_offsets(self, z, offsets=None):
        """w(z) with optionally exact branch-point offsets z - lambda_i.

        Both square-root arguments of a cut derive from one expression
        (u-1 = u+1 - 2), so rounding noise cannot push them to opposite
        sides of the branch line.
        """
        z = np.asarray(z, dtype=complex)
        if not offsets:
            return self.sym.eval_w(z)
        val = np.ones_like(z)
        for j, (a, b) in enumerate(self.cuts):
            h = 0.5 * (b - a)
            if 2 * j in offsets:
                up = offsets[2 * j] / h
                um = up - 2.0
            elif 2 * j + 1 in offsets:
                um = offsets[2 * j + 1] / h
                up = um + 2.0
            else:
                u = (z - 0.5 * (a + b)) / h
                up = u + 1.0
                um = u - 1.0
            val = val * h * np.sqrt(um) * np.sqrt(up)
        return val

    def _mono_over_w(self, z, offsets=None):
        z = np.asarray(z, dtype=complex)
        w = self._w_from_offsets(z, offsets)
        powers = z[None, :] ** np.arange(self.n_mono)[:, None]
        return powers / w[None, :]

    def _mono_and_log(self, z, offsets=None):
        """Monomials over w plus a final row 1/(z - lambda_1).

        The extra row accumulates log(z - lambda_1) along the same routed
        path as the Abel map and Delta, which keeps the square-root and
        exponential prefactors of the factorization matrix on one branch
        system regardless of the route taken.
        """
        z = np.asarray(z, dtype=complex)
        vals = self._mono_over_w(z, offsets)
        return np.concatenate([vals, (1.0 / (z - self.lam[0]))[None, :]])

    def _w_excluding(self, z, cut_idx):
        z = np.asarray(z, dtype=complex)
        val = np.ones_like(z)
        for j, (a, b) in enumerate(self.cuts):
            if j == cut_idx:
                continue
            m = 0.5 * (a + b)
            h = 0.5 * (b - a)
            u = (z - m) / h
            val = val * h * np.sqrt(u - 1.0) * np.sqrt(u + 1.0)
        return val

    # ----- a-type loop integrals --------------------------------------------

    def loop_monomials(self, cut_idx: int) -> np.ndarray:
        """(2/i) * int_0^pi z(t)^k / w_excluding dt around the given cut."""
        a, b = self.cuts[cut_idx]
        m = 0.5 * (a + b)
        h = 0.5 * (b - a)

        def evaluate(N):
            t = (np.arange(N) + 0.5) * np.pi / N
            z = m + h * np.cos(t)
            s_other = self._w_excluding(z, cut_idx)
            powers = z[None, :] ** np.arange(self.n_mono)[:, None]
            vals = powers / s_other[None, :]
            return vals.sum(axis=-1) * (np.pi / N) * (2.0 / 1j)

        return self.quad._double(evaluate)

    def half_cut_monomials(self, cut_idx: int) -> np.ndarray:
        """One-sided integral along the cut from start to end (half a loop)."""
        return 0.5 * self.loop_monomials(cut_idx)

    def gap_monomials(self, gap_index: int) -> np.ndarray:
        """Integral over gap segment [lambda_{2k}, lambda_{2k+1}] (0-based)."""
        ia = 2 * gap_index + 1
        ib = 2 * gap_index + 2

        def F(z, jac, offsets):
            vals = self._mono_over_w(z, offsets)
            return vals * jac[None, :]

        return self.quad.chebyshev(F, self.lam[ia], self.lam[ib],
                                   idx_a=ia, idx_b=ib)

    # ----- chain walk -----------------------------------------------------------

    def chain_cumulative(self) -> np.ndarray:
        """Monomial integrals from lambda_1 to every branch point.

        The path follows the chain of cuts (one-sided values) and gaps; row i
        holds int_{lambda_1}^{lambda_{i+1}}.  Used for the Abel map at branch
        points, where any path is valid modulo the period lattice.
        """
        lam = self.lam
        acc = np.zeros(self.n_mono, dtype=complex)
        rows = [acc.copy()]
        for i in range(len(lam) - 1):
            if i % 2 == 0:
                seg = self.half_cut_monomials(i // 2)
            else:
                seg = self.gap_monomials((i - 1) // 2)
            acc = acc + seg
            rows.append(acc.copy())
        return np.array(rows)

    # ----- b-cycle arcs ----------------------------------------------------------

    def b_arc_monomials(self, target_cut: int, H: float) -> np.ndarray:
        """Twice the integral from lambda_2 to the left end of the target cut.

        The b-cycle pinches through the two branch points and must stay off
        every intermediate cut, so the path arcs over them through a highway
        above all branch points (endpoints handled with the u**2 substitution).
        Doubling is exact: the second-sheet return retraces the same curve.
        """
        lam = self.lam
        start = lam[1]
        end = lam[2 * target_cut]
        a0, b0 = self.cuts[0]
        at, bt = self.cuts[target_cut]
        d0 = (b0 - a0) / abs(b0 - a0)
        dt = (bt - at) / abs(bt - at)
        l0 = 0.4 * min(self._clearance(0), abs(b0 - a0))
        lt = 0.4 * min(self._clearance(target_cut), abs(bt - at))
        p1 = start + l0 * (1j * d0)
        p2 = end + lt * (1j * dt)
        way = [p1, complex(p1.real, H), complex(p2.real, H), p2]
        total = self.quad.from_branch(self._mono_over_w, start, p1, lam_index=1)
        for i, (a, b) in enumerate(zip(way[:-1], way[1:])):
            if abs(b - a) == 0:
                continue
            skip = {0, target_cut} if i in (0, len(way) - 2) else set()
            for j, (c, d) in enumerate(self.cuts):
                if j in skip:
                    continue
                if _segments_cross(a, b, c, d):
                    raise PathRoutingFailure(
                        f"b-arc to cut {target_cut} crosses cut {j}")
            total = total + self.quad.regular(self._mono_over_w, a, b)
        total = total - self.quad.from_branch(self._mono_over_w, end, p2,
                                              lam_index=2 * target_cut)
        return 2.0 * total

    def _clearance(self, cut_idx: int) -> float:
        a, b = self.cuts[cut_idx]
        best = np.inf
        for j, (c, d) in enumerate(self.cuts):
            if j == cut_idx:
                continue
            for p in (c, d, 0.5 * (c + d)):
                best = min(best, float(_segment_distance(p, a, b)))
            for p in (a, b, 0.5 * (a + b)):
                best = min(best, float(_segment_distance(p, c, d)))
        return best

    # ----- tails to infinity ---------------------------------------------------

    def tail_monomials(self, z0: complex):
        """int_{z0}^{inf} of the monomial vector along the leftward ray.

        The top monomial z^{2n-1}/w ~ 1/z is log-divergent at infinity, so
        its row always carries the subtraction of 1/(z - lambda_1) (exactly
        the combination Delta_0 needs); every row then decays like z^-2.
        Parametrized z = z0 - S0 (1-v)/v, v in (0, 1].
        """
        S0 = 10.0 * max(1.0, float(np.max(np.abs(self.lam))))
        lam1 = self.lam[0]

        def F(v):
            v = np.asarray(v)
            z = z0 - S0 * (1.0 - v) / v
            vals = self._mono_over_w(z)
            vals[-1] = vals[-1] - 1.0 / (z - lam1)
            jac = -S0 / v ** 2  # dz = -(S0/v^2) dv along z0 -> infinity
            return vals * jac[None, :]

        # (plain integrand: far from every branch point)

        def evaluate(N):
            x, w = _gl_rule(N)
            v = 0.5 * (x + 1.0)
            vals = F(v)
            return vals @ w * 0.5

        return self.quad._double(evaluate)

    # ----- assembly --------------------------------------------------------------

    def build(self) -> CurveData:
        n, g = self.n, self.g
        lam = self.lam
        n_cuts = len(self.cuts)

        # a-period matrix of monomials over cuts 1..2n-1 (dropping cut 0)
        A = np.zeros((g, self.n_mono), dtype=complex)
        for i in range(g):
            A[i] = self.loop_monomials(i + 1)
        A_g = A[:, :g]
        cond = np.linalg.cond(A_g)
        if cond > 1e12:
            raise IllConditioned(f"monomial period matrix condition {cond:.3e}")
        basis_coeffs = np.linalg.solve(A_g, np.eye(g)).T  # rows P_j

        # third-kind differential with vanishing a-periods and residue +1/2 at
        # the sheet-1 infinity (leading coefficient -1/2); the opposite-growth
        # primitive -Delta is what enters the explicit RH solution
        c_low = np.linalg.solve(A_g, 0.5 * A[:, self.n_mono - 1])
        dDelta = np.concatenate([c_low, [-0.5]])

        # b-cycle monomial periods: arcs pinching through lambda_2 and
        # lambda_{2i+1}, over every intermediate cut
        chain = self.chain_cumulative()
        router_probe = _PathRouter(self.sym, self.quad, self._mono_over_w)
        Bmono = np.array([self.b_arc_monomials(i, router_probe.H)
                          for i in range(1, g + 1)])

        Pi0 = Bmono[:, :g] @ basis_coeffs.T
        # The arcs return periods of SOME canonical-basis b-cycles up to
        # integer a-cycle admixtures (one per intermediate cut).  Recombining
        # b_i -> b_i - sum_k m_ik a_k with integer m symmetrizes Pi and leaves
        # kappa untouched (dDelta has vanishing a-periods).
        D = Pi0 - Pi0.T
        m_int = np.rint(D.real)
        if np.max(np.abs(D - m_int)) > 1e-8:
            raise ConvergenceFailure(
                f"non-integer period asymmetry {np.max(np.abs(D - m_int)):.3e}")
        Pi0 = Pi0 - np.tril(m_int, -1)
        kappa0 = (Bmono @ dDelta) / (2j * np.pi)

        # omega(inf) and Delta_0 via the left corridor: the log(z - lambda_1)
        # stays on a continuous branch along the leftward ray (constant
        # positive imaginary part), so
        #   Delta_0 = Delta(z0) - (1/2)log(z0 - lambda_1)
        #           + int_{z0}^inf [dDelta/dz - 1/(2(z - lambda_1))] dz.
        p_top, base_mono = router_probe._base_integrals()
        tail = self.tail_monomials(p_top)
        omega_inf = basis_coeffs @ (base_mono + tail)[:g]
        # Delta_0 = lim [-Delta(z) - (1/2) log(z - lambda_1)] for the growing
        # primitive -Delta ~ +(1/2) log z used by the RH solution
        delta0 = (complex(-dDelta @ base_mono) + complex(-dDelta @ tail)
                  - 0.5 * np.log(p_top - lam[0]))

        # calibration: the only free relative sign between the a- and b-cycle
        # families is pinned by Im Pi > 0 and cross-checked by kappa=omega(inf)
        evals0 = np.linalg.eigvalsh(0.5 * (Pi0.imag + Pi0.imag.T))
        if np.all(evals0 > 0):
            s = 1.0
        elif np.all(evals0 < 0):
            s = -1.0
        else:
            raise ConvergenceFailure(
                f"Im Pi indefinite (eigs {evals0}); cycle realization broken")
        Pi = s * Pi0
        kappa = s * kappa0

        sym_err = float(np.max(np.abs(Pi - Pi.T)))
        scale = float(np.max(np.abs(Pi)))
        if sym_err > 1e-9 * max(1.0, scale):
            raise ConvergenceFailure(f"period matrix asymmetry {sym_err:.3e}")
        Pi = 0.5 * (Pi + Pi.T)

        # Abel map at the branch points (already accumulated along the chain)
        omega_branch = chain[:, :g] @ basis_coeffs.T

        X = Pi.imag
        Xinv = np.linalg.inv(X)
        half_N = np.zeros((len(lam), g), dtype=int)
        half_M = np.zeros((len(lam), g), dtype=int)
        worst = 0.0
        for i in range(len(lam)):
            v = omega_branch[i]
            M = np.rint(2.0 * (Xinv @ v.imag))
            N = np.rint(2.0 * v.real - (Pi.real @ M))
            res = np.max(np.abs(v - 0.5 * (N + Pi @ M)))
            worst = max(worst, float(res))
            half_N[i] = N.astype(int)
            half_M[i] = M.astype(int)
        if worst > _HALF_PERIOD_TOL:
            raise ConvergenceFailure(
                f"branch-point Abel values fail to snap to half periods "
                f"({worst:.3e})")

        # kappa = omega(inf) cross-check (allowing full-lattice slack)
        def lattice_residual(v):
            q = np.rint(np.linalg.solve(X, v.imag))
            rem = v - Pi @ q
            return float(np.max(np.abs(rem - np.rint(rem.real)))), q

        diff = kappa - omega_inf
        kappa_exact = float(np.max(np.abs(diff)))
        kappa_mod, _ = lattice_residual(diff)
        if min(kappa_exact, kappa_mod) > _HALF_PERIOD_TOL:
            raise ConvergenceFailure(
                f"kappa vs omega(inf) mismatch: exact {kappa_exact:.3e}, "
                f"mod lattice {kappa_mod:.3e}")

        # Riemann constant K = -sum_{j=2}^{2n} omega(lambda_{2j-1})
        K_N = np.zeros(g, dtype=int)
        K_M = np.zeros(g, dtype=int)
        for j in range(2, 2 * n + 1):
            idx = 2 * j - 2  # 0-based index of lambda_{2j-1}
            K_N -= half_N[idx]
            K_M -= half_M[idx]

        # tau/2 = -sum over non-base reciprocal branch points - K
        recip_idx = [i for i in range(len(lam)) if self.sym.is_recip[i]]
        if 0 not in recip_idx:
            raise DegenerateModel("base point is not in the reciprocal family")
        tau_N = -K_N.copy()
        tau_M = -K_M.copy()
        for i in recip_idx:
            if i == 0:
                continue
            tau_N -= half_N[i]
            tau_M -= half_M[i]

        # e-vector from the cut classification (standard layout: last n
        # entries 1, marking the cuts outside the unit circle)
        e_vec = np.zeros(g)
        radii = np.abs(lam)
        inner = []
        outer = []
        for ci in range(n_cuts):
            r1, r2 = radii[2 * ci], radii[2 * ci + 1]
            if r1 < 1 and r2 < 1:
                inner.append(ci)
            elif r1 > 1 and r2 > 1:
                outer.append(ci)
            else:
                raise DegenerateModel(f"cut {ci} crosses the unit circle")
        for ci in outer:
            if ci >= 1:
                e_vec[ci - 1] = 1.0

        # the closed-form entropy/determinant/RH results are derived for the
        # layout with the first n cuts inside the unit circle and the last n
        # outside (and the base point on an inner cut); other reciprocal-pair
        # configurations produce valid curves but are rejected by the
        # asymptotic engine
        standard = (inner == list(range(n)) and outer == list(range(n, 2 * n)))

        diagnostics = {
            "pi_asymmetry": sym_err,
            "im_pi_eigs": np.linalg.eigvalsh(Pi.imag).tolist(),
            "half_period_residual": worst,
            "kappa_residual_exact": kappa_exact,
            "kappa_residual_mod_lattice": kappa_mod,
            "a_matrix_condition": float(cond),
            "orientation_sign": s,
            "inner_cuts": inner,
            "outer_cuts": outer,
            "standard_configuration": standard,
        }

        curve = CurveData(
            symbol=self.sym, lam=lam, genus=g, cuts=self.cuts, Pi=Pi,
            basis_coeffs=basis_coeffs, dDelta_coeffs=dDelta,
            kappa=kappa, omega_inf=omega_inf, delta0=complex(delta0),
            half_N=half_N, half_M=half_M, K_N=K_N, K_M=K_M,
            tau_N=tau_N, tau_M=tau_M, e_vector=e_vec,
            diagnostics=diagnostics,
        )
        curve._router = _PathRouter(self.sym, self.quad, self._mono_and_log,
                                    with_log=True,
                                    base_integrand=self._mono_over_w)
        return curve


def build_curve(sym: SymbolData, node_tol: float = _NODE_TOL) -> CurveData:
    return _CurveBuilder(sym, node_tol).build()
