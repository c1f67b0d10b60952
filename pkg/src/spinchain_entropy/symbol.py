"""Branch-point data and the scalar/matrix symbol.

The 4n branch points {lambda_i} = {roots of p} u {their reciprocals} are
ordered by real part (ties split by imaginary part: ascending inside the
unit circle, descending outside).  Cuts join consecutive pairs.  The first
branch point is arranged to belong to the reciprocal family; when the raw
root set violates that, the two families are swapped globally (the swap
transposes the block-Toeplitz matrix and leaves every determinant and the
entropy unchanged).

g(z) is evaluated off the circle through w(z), the product of per-cut
square roots sqrt((z - start)(z - end)) whose only discontinuities are the
cuts themselves; on the circle the unimodular ratio q(z)/|q(z)| is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ConvergenceFailure, CriticalSymbol, DegenerateModel,
                     OnBranchCut)
from .model import ChainModel, ComplexPolynomial, build_p, build_q

DEFAULT_CRIT_TOL = 1e-8
_ROOT_RESIDUAL_TOL = 1e-10
_PAIR_TOL = 1e-10


def find_roots(p: ComplexPolynomial) -> np.ndarray:
    """Roots of p via companion-matrix eigenvalues plus Newton polishing."""
    if p.low != 0:
        raise DegenerateModel("find_roots expects an ordinary polynomial")
    c = p.coeffs
    deg = len(c) - 1
    if deg < 1:
        raise DegenerateModel("constant polynomial has no roots")
    roots = np.polynomial.polynomial.polyroots(c)
    dc = c[1:] * np.arange(1, deg + 1)

    def horner(coeffs, z):
        v = np.zeros_like(z)
        for ck in coeffs[::-1]:
            v = v * z + ck
        return v

    for _ in range(4):
        pv = horner(c, roots)
        dv = horner(dc, roots)
        step = np.where(np.abs(dv) > 0, pv / np.where(dv == 0, 1.0, dv), 0.0)
        roots = roots - step

    scale = np.max(np.abs(c))
    residual = np.abs(horner(c, roots)) / (scale * np.maximum(1.0, np.abs(roots)) ** deg)
    if np.max(residual) > _ROOT_RESIDUAL_TOL:
        raise ConvergenceFailure(
            f"root residual {np.max(residual):.3e} above {_ROOT_RESIDUAL_TOL}")
    return roots


def _order_branch_points(points: np.ndarray, tags: np.ndarray):
    """Sort by Re; split ties by Im ascending inside |z|<1, descending outside."""
    scale = max(1.0, float(np.max(np.abs(points))))
    tol = 1e-12 * scale
    order = np.argsort(points.real, kind="stable")
    pts = points[order]
    tgs = tags[order]
    # regroup ties and apply the imaginary-part rules
    out_idx = []
    i = 0
    m = len(pts)
    while i < m:
        j = i + 1
        while j < m and pts[j].real - pts[i].real <= tol:
            j += 1
        group = list(range(i, j))
        if len(group) > 1:
            inside = [k for k in group if abs(pts[k]) < 1.0]
            outside = [k for k in group if abs(pts[k]) >= 1.0]
            inside.sort(key=lambda k: pts[k].imag)
            outside.sort(key=lambda k: -pts[k].imag)
            group = inside + outside
        out_idx.extend(group)
        i = j
    perm = order[np.array(out_idx)]
    return points[perm], tags[perm]


def _segment_distance(z, a, b) -> np.ndarray:
    """Distance from point(s) z to the segment [a, b]."""
    z = np.asarray(z, dtype=complex)
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return np.abs(z - a)
    t = np.clip(((z - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return np.abs(z - (a + t * d))


@dataclass
class SymbolData:
    """Ordered branch points, cuts and g-evaluators for one model."""

    model: ChainModel
    p: ComplexPolynomial
    q: ComplexPolynomial
    roots: np.ndarray          # roots of p as found
    roots_eff: np.ndarray      # root family after the optional swap
    lam: np.ndarray            # 4n ordered branch points
    is_recip: np.ndarray       # True where lam[i] belongs to the reciprocal family
    transposed: bool
    recip_partner: np.ndarray  # index of 1/lam[i] in lam
    conj_partner: np.ndarray   # index of conj(lam[i]) in lam
    cuts: list                 # 2n (start, end) pairs
    crit_distance: float
    crit_tol: float
    g_inf: float               # g(+infinity) > 0
    circle_sign: int           # eval_g on |z|=1 vs q/|q| (conjugated if transposed)

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def genus(self) -> int:
        return 2 * self.model.n - 1

    # ----- w and g ---------------------------------------------------------

    def eval_w(self, z):
        """Sheet-1 branch of w, w**2 = prod(z - lambda_i), w ~ +z^{2n} at inf.

        Built as the product of per-cut factors sqrt((z-a)(z-b)) whose branch
        cut is exactly the segment [a, b]; single-valued off the cuts.
        """
        z = np.asarray(z, dtype=complex)
        val = np.ones_like(z)
        for (a, b) in self.cuts:
            m = 0.5 * (a + b)
            h = 0.5 * (b - a)
            u = (z - m) / h
            val = val * h * np.sqrt(u - 1.0) * np.sqrt(u + 1.0)
        return val

    def eval_g(self, z, cut_check: bool = True):
        """g(z) off the cuts, branch fixed by g(+inf) > 0."""
        z = np.asarray(z, dtype=complex)
        if cut_check:
            for (a, b) in self.cuts:
                if np.any(_segment_distance(z, a, b) < 1e-12):
                    raise OnBranchCut("z lies on a branch cut")
        num = np.ones_like(z)
        for r in self.roots_eff:
            num = num * (z - r)
        g = num / self.eval_w(z) * self.g_inf
        return g if g.shape else complex(g)

    def eval_g_circle(self, theta):
        """Unimodular symbol q(e^{i theta})/|q(e^{i theta})| on the circle."""
        theta = np.asarray(theta, dtype=float)
        qv = self.q(np.exp(1j * theta))
        qv = np.asarray(qv, dtype=complex)
        if np.any(np.abs(qv) < 1e-12):
            raise CriticalSymbol("q vanishes on the unit circle")
        g = qv / np.abs(qv)
        return g if g.shape else complex(g)

    def eval_symbol(self, z: complex, lam: complex, g_mode: str = "circle") -> np.ndarray:
        """2x2 matrix symbol [[i*lam, g], [-1/g, i*lam]]; det = 1 - lam**2."""
        if g_mode == "circle":
            g = self.eval_g_circle(float(np.angle(complex(z))))
        else:
            g = self.eval_g(complex(z))
        return np.array([[1j * lam, g], [-1.0 / g, 1j * lam]], dtype=complex)

    def require_noncritical(self):
        if self.crit_distance < self.crit_tol:
            raise CriticalSymbol(
                f"branch point within {self.crit_distance:.2e} of the unit circle")


def _snap_real(values: np.ndarray) -> np.ndarray:
    """Zero out imaginary dust so axis-aligned branch data is exactly real.

    Keeps one-sided square-root evaluations deterministic along real paths
    (the sign of +-0j would otherwise follow rounding noise).
    """
    values = np.array(values, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(values))))
    mask = np.abs(values.imag) < 1e-13 * scale
    values[mask] = values[mask].real
    return values


def build_symbol(model: ChainModel, crit_tol: float = DEFAULT_CRIT_TOL,
                 allow_critical: bool = False) -> SymbolData:
    """Find roots, order branch points, fix families and calibrate branches."""
    p = build_p(model)
    q = build_q(model)
    roots = _snap_real(find_roots(p))
    if np.any(np.abs(roots) < 1e-14):
        raise DegenerateModel("root at the origin")

    crit_distance = float(np.min(np.abs(1.0 - np.abs(roots))))
    if crit_distance < crit_tol and not allow_critical:
        raise CriticalSymbol(
            f"root within {crit_distance:.2e} of the unit circle (tol {crit_tol})")

    pts = np.concatenate([roots, 1.0 / roots])
    tags = np.concatenate([np.zeros(len(roots), dtype=bool),
                           np.ones(len(roots), dtype=bool)])  # True = reciprocal
    lam, is_recip = _order_branch_points(pts, tags)

    # distinct branch points (the curve machinery assumes simple ones)
    scale = max(1.0, float(np.max(np.abs(lam))))
    diffs = np.abs(lam[:, None] - lam[None, :]) + np.eye(len(lam)) * scale
    if np.min(diffs) < 1e-10 * scale:
        if not allow_critical:
            raise DegenerateModel("coincident branch points")

    transposed = False
    roots_eff = roots
    if not is_recip[0]:
        # swap families so lambda_1 is a reciprocal (transposes T_L, leaves
        # determinants and the entropy unchanged)
        transposed = True
        is_recip = ~is_recip
        roots_eff = 1.0 / roots

    recip_partner = np.full(len(lam), -1, dtype=int)
    conj_partner = np.full(len(lam), -1, dtype=int)
    for i, lv in enumerate(lam):
        dr = np.abs(lam - 1.0 / lv)
        dcj = np.abs(lam - np.conj(lv))
        jr = int(np.argmin(dr))
        jc = int(np.argmin(dcj))
        if dr[jr] < _PAIR_TOL * scale:
            recip_partner[i] = jr
        if dcj[jc] < _PAIR_TOL * scale:
            conj_partner[i] = jc

    cuts = [(complex(lam[2 * i]), complex(lam[2 * i + 1]))
            for i in range(len(lam) // 2)]

    # branch normalization: g(z) = prod(z - r_eff) / w(z) * g_inf with
    # g_inf = 1/sqrt(prod(-r_eff)) so that g(+inf) = g_inf > 0
    c0 = complex(np.prod(-roots_eff))
    if abs(c0.imag) > 1e-9 * max(1.0, abs(c0)) or c0.real <= 0:
        raise DegenerateModel(
            "g**2(inf) = %r is not positive real; branch convention undefined" % c0)
    g_inf = 1.0 / float(np.sqrt(c0.real))

    sym = SymbolData(model=model, p=p, q=q, roots=roots, roots_eff=roots_eff,
                     lam=lam, is_recip=is_recip, transposed=transposed,
                     recip_partner=recip_partner, conj_partner=conj_partner,
                     cuts=cuts, crit_distance=crit_distance, crit_tol=crit_tol,
                     g_inf=g_inf, circle_sign=0)

    if crit_distance >= crit_tol and not _any_cut_crosses_circle(cuts):
        # a cut through |z| = 1 makes the product-formula branch flip on the
        # circle itself; such layouts only ever reach the exact engine, which
        # uses q/|q| directly, so circle_sign stays 0 there
        sym.circle_sign = _calibrate_circle_sign(sym)
    return sym


def _any_cut_crosses_circle(cuts) -> bool:
    for (a, b) in cuts:
        inner = min(abs(a), abs(b), float(_segment_distance(0.0, a, b)))
        outer = max(abs(a), abs(b))
        if inner < 1.0 < outer:
            return True
    return False


def _calibrate_circle_sign(sym: SymbolData, samples: int = 256) -> int:
    """Global sign between the product-formula branch and q/|q| on the circle."""
    theta = (np.arange(samples) + 0.37) * 2 * np.pi / samples
    z = np.exp(1j * theta)
    g_curve = sym.eval_g(z, cut_check=False)
    g_circ = sym.eval_g_circle(theta)
    if sym.transposed:
        g_circ = np.conj(g_circ)
    ratio = g_curve / g_circ
    sign = 1 if np.mean(ratio.real) > 0 else -1
    err = np.max(np.abs(ratio - sign))
    if err > 1e-9:
        raise ConvergenceFailure(
            f"branch consistency failure: |g_curve/g_circle -+ 1| = {err:.3e}")
    return sign
