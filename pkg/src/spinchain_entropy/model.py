"""Finite-range translation-invariant quadratic chains and their symbol data.

A chain is specified by the coupling sequences a(0..n), b(1..n) and the
anisotropy gamma.  The scalar Laurent polynomial

    q(z) = sum_{j=-n}^{n} (a(j) - gamma*b(j)) z^j,     a(-j)=a(j), b(-j)=-b(j)

and p(z) = z^n q(z) carry everything downstream: the unimodular symbol on
the circle is q(z)/|q(z)| and the branch points are the roots of p together
with their reciprocals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModel

#: absolute floor for the effective leading coefficients a(n) -+ gamma*b(n)
LEADING_COEFF_TOL = 1e-12


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial (or Laurent polynomial) with ascending coefficients.

    ``coeffs[k]`` multiplies ``z**(k + low)``; ``low=0`` gives an ordinary
    polynomial.  Exact trailing zeros at the top are trimmed at construction.
    """

    coeffs: np.ndarray
    low: int = 0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        nz = np.nonzero(c)[0]
        if len(nz) == 0:
            raise DegenerateModel("zero polynomial")
        c = c[: nz[-1] + 1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 + self.low

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            val = val * z + c
        if self.low != 0:
            val = val * z ** self.low
        return val if val.shape else complex(val)


@dataclass(frozen=True)
class ChainModel:
    """Couplings of a finite-range translation-invariant quadratic chain.

    ``a`` has n+1 entries a(0..n) (even extension implied), ``b`` has n
    entries b(1..n) (odd extension implied, b(0)=0).  ``gamma`` in [0, 1].
    """

    n: int
    a: tuple
    b: tuple
    gamma: float
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise DegenerateModel("interaction range n must be >= 1")
        if len(self.a) != self.n + 1:
            raise DegenerateModel(f"a must have n+1={self.n + 1} entries, got {len(self.a)}")
        if len(self.b) != self.n:
            raise DegenerateModel(f"b must have n={self.n} entries, got {len(self.b)}")
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "gamma", float(self.gamma))
        an, bn = self.a[self.n], self.b[self.n - 1]
        for sign in (-1.0, +1.0):
            if abs(an + sign * self.gamma * bn) <= LEADING_COEFF_TOL:
                raise DegenerateModel(
                    "effective leading coefficient a(n) %s gamma*b(n) vanishes "
                    "(degree of p(z) would drop)" % ("+" if sign > 0 else "-")
                )

    def coupling(self, j: int) -> tuple[float, float]:
        """Return (a(j), b(j)) honoring the even/odd extensions."""
        k = abs(j)
        if k > self.n:
            return 0.0, 0.0
        aj = self.a[k]
        bj = 0.0 if k == 0 else float(np.sign(j)) * self.b[k - 1]
        return aj, bj


def make_xy_model(alpha: float, gamma: float) -> ChainModel:
    """Nearest-neighbour anisotropic chain with exchange coupling alpha.

    The couplings are chosen so that p(z) is exactly proportional to
    alpha*(1-gamma)/2 * z**2 - z + alpha*(1+gamma)/2.  gamma = 1 makes the
    leading coefficient vanish and is rejected.
    """
    if alpha <= 0:
        raise DegenerateModel("alpha must be positive")
    if not 0 <= gamma:
        raise DegenerateModel("gamma must be in [0, 1)")
    if gamma >= 1:
        raise DegenerateModel("gamma >= 1 degenerates the leading coefficient")
    return ChainModel(n=1, a=(-2.0, alpha), b=(alpha,), gamma=gamma,
                      label=f"xy(alpha={alpha}, gamma={gamma})")


def make_xx_model(alpha: float) -> ChainModel:
    """Isotropic (gamma = 0) nearest-neighbour chain."""
    return make_xy_model(alpha, 0.0)


def make_custom_model(a, b, gamma: float, label: str = "") -> ChainModel:
    """Validate raw coupling sequences into a ChainModel."""
    a = tuple(a)
    b = tuple(b)
    return ChainModel(n=len(a) - 1, a=a, b=b, gamma=gamma, label=label or "custom")


def q_coefficients(model: ChainModel) -> np.ndarray:
    """Laurent coefficients c_{-n}..c_{n} of q(z), ascending in the power."""
    n = model.n
    c = np.zeros(2 * n + 1)
    for j in range(-n, n + 1):
        aj, bj = model.coupling(j)
        c[j + n] = aj - model.gamma * bj
    return c


def build_q(model: ChainModel) -> ComplexPolynomial:
    """q(z) as a Laurent polynomial (low = -n)."""
    return ComplexPolynomial(q_coefficients(model), low=-model.n)


def build_p(model: ChainModel) -> ComplexPolynomial:
    """p(z) = z^n q(z); degree exactly 2n with p(0) != 0."""
    c = q_coefficients(model)
    if abs(c[0]) <= LEADING_COEFF_TOL or abs(c[-1]) <= LEADING_COEFF_TOL:
        raise DegenerateModel("p(z) must have degree exactly 2n with p(0) != 0")
    return ComplexPolynomial(c, low=0)


def make_model_from_roots(roots, label: str = "") -> ChainModel:
    """Chain whose symbol polynomial has exactly the given roots.

    The root set must be closed under conjugation (real couplings); gamma is
    fixed to 1 and the asymmetric part of the coefficients goes into b.
    """
    roots = np.asarray(roots, dtype=complex)
    c = np.array([1.0 + 0j])
    for r in roots:
        c = np.convolve(c, np.array([-r, 1.0]))
    if np.max(np.abs(c.imag)) > 1e-10 * max(1.0, np.max(np.abs(c))):
        raise DegenerateModel("root set is not closed under conjugation")
    c = c.real
    if len(c) % 2 == 0:
        raise DegenerateModel("need an even number of roots")
    n = (len(c) - 1) // 2
    a = tuple((c[n + j] + c[n - j]) / 2.0 for j in range(n + 1))
    b = tuple((c[n - j] - c[n + j]) / 2.0 for j in range(1, n + 1))
    return ChainModel(n=n, a=a, b=b, gamma=1.0, label=label or "from-roots")


def model_from_dict(spec: dict) -> ChainModel:
    """Build a model from a JSON-style dict.

    Either {"preset": "xy"|"xx", "alpha": ..., "gamma": ...} or
    {"n": ..., "a": [...], "b": [...], "gamma": ...}.
    """
    if "preset" in spec:
        preset = spec["preset"].lower()
        if preset == "xy":
            return make_xy_model(float(spec["alpha"]), float(spec.get("gamma", 0.0)))
        if preset == "xx":
            return make_xx_model(float(spec["alpha"]))
        raise DegenerateModel(f"unknown preset {spec['preset']!r}")
    return make_custom_model(spec["a"], spec["b"], float(spec["gamma"]),
                             label=spec.get("label", ""))
