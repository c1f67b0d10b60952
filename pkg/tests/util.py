"""Shared fixtures: reference models and the randomized curve family."""

import numpy as np

from spinchain_entropy.errors import SpinChainError
from spinchain_entropy.model import (ChainModel, make_model_from_roots,
                                     make_xy_model)
from spinchain_entropy.symbol import build_symbol


def xy_reference() -> ChainModel:
    """Genus-1 workhorse: crit distance 0.3028, entropy 0.21515987423..."""
    return make_xy_model(0.8, 0.5)


def genus3_reference() -> ChainModel:
    """Standard-layout genus-3 model (two real roots outside, one conjugate
    pair inside), crit distance 0.205."""
    return make_model_from_roots(
        [2.2, 3.0, 0.795 * np.exp(0.5j), 0.795 * np.exp(-0.5j)])


def _clean_cut_layout(sym) -> bool:
    """Cuts join either two real points or a conjugate pair.

    That is the layout the whole framework pictures (real segments and
    vertical segments); orderings that interleave a real point between the
    members of a conjugate pair produce zigzag cuts outside it.
    """
    for (a, b) in sym.cuts:
        real_pair = abs(a.imag) < 1e-12 and abs(b.imag) < 1e-12
        conj_pair = abs(a - np.conj(b)) < 1e-10 * max(1.0, abs(a))
        if not (real_pair or conj_pair):
            return False
        if min(abs(a), abs(b)) < 1.0 < max(abs(a), abs(b)):
            return False  # cut would cross the unit circle
    return True


def genus5_reference():
    """Standard-layout n=3 model: inside conjugate pair and real root,
    outside real roots; crit distance 0.28."""
    return make_model_from_roots(
        [2.6, 3.4, 0.72 * np.exp(0.65j), 0.72 * np.exp(-0.65j), 0.5, 1.9])


def random_chain_models(count: int, seed: int = 20240601,
                        n_values=(1, 2, 3), min_crit: float = 0.15):
    """Deterministic family of valid non-critical models with n <= 3.

    Roots are sampled as real values and conjugate pairs with moduli well
    away from the unit circle; configurations whose symbol or curve
    construction is degenerate are skipped.
    """
    rng = np.random.default_rng(seed)
    out = []
    guard = 0
    while len(out) < count and guard < 200 * count:
        guard += 1
        n = int(rng.choice(n_values))
        roots = []
        slots = 2 * n
        while slots > 0:
            outside = rng.random() < 0.5
            r = rng.uniform(1.35, 2.8) if outside else rng.uniform(0.35, 0.72)
            if slots >= 2 and rng.random() < 0.6:
                phi = rng.uniform(0.25, 2.6)
                roots += [r * np.exp(1j * phi), r * np.exp(-1j * phi)]
                slots -= 1
            else:
                roots.append(r * rng.choice([-1.0, 1.0]))
            slots -= 1
        if len(roots) != 2 * n:
            continue
        try:
            model = make_model_from_roots(roots)
            sym = build_symbol(model)
        except SpinChainError:
            continue
        if sym.crit_distance < min_crit:
            continue
        if not _clean_cut_layout(sym):
            continue
        out.append(model)
    if len(out) < count:
        raise RuntimeError("random family generation starved")
    return out
