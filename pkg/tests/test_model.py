import numpy as np
import pytest

from spinchain_entropy.errors import DegenerateModel
from spinchain_entropy.model import (build_p, build_q, make_custom_model,
                                     make_model_from_roots, make_xx_model,
                                     make_xy_model, model_from_dict,
                                     q_coefficients)
from spinchain_entropy.symbol import build_symbol, find_roots


def test_xy_preset_roots_match_quadratic_formula():
    # alpha=4/5, gamma=0: p ~ (2/5) z^2 - z + 2/5, roots 1/2 and 2
    model = make_xy_model(0.8, 0.0)
    roots = np.sort(find_roots(build_p(model)).real)
    assert np.allclose(roots, [0.5, 2.0], atol=1e-12)


def test_xy_preset_complex_roots():
    # alpha=2, gamma=1/2: p ~ (1/2) z^2 - z + 3/2, roots 1 +- i sqrt(2)
    model = make_xy_model(2.0, 0.5)
    roots = np.sort_complex(find_roots(build_p(model)))
    expected = np.sort_complex(np.roots([0.5, -1.0, 1.5]))
    assert np.allclose(roots, expected, atol=1e-12)


def test_xy_gamma_one_rejected():
    with pytest.raises(DegenerateModel):
        make_xy_model(1.0, 1.0)


def test_custom_model_echo():
    model = make_custom_model((-2, 1, 0.25), (1, 0.125), 0.5)
    assert model.n == 2
    assert model.a == (-2.0, 1.0, 0.25)
    assert model.b == (1.0, 0.125)


def test_custom_model_leading_rule_accepts_offset_couplings():
    # a(n)=0, b(n)=1, gamma=1: effective leading coefficients are -+1
    model = make_custom_model((-2, 0), (1,), 1.0)
    assert model.n == 1
    p = build_p(model)
    assert p.degree == 2


def test_custom_model_vanishing_leading_rejected():
    # a(n) = gamma*b(n) kills the z^{2n} coefficient
    with pytest.raises(DegenerateModel):
        make_custom_model((-2, 1.0), (1.0,), 1.0)


def test_xx_q_coefficients():
    # q = 0.8 z^-1 - 2 + 0.8 z, proportional to (2/5) z^-1 - 1 + (2/5) z:
    # only the ray of q matters (g is scale invariant)
    model = make_xx_model(0.8)
    c = q_coefficients(model)
    assert np.allclose(c, [0.8, -2.0, 0.8], atol=1e-15)
    assert np.allclose(c / 2.0, [0.4, -1.0, 0.4], atol=1e-15)
    q = build_q(model)
    theta = 0.7
    z = np.exp(1j * theta)
    assert abs(q(z) - (2 * 0.8 * np.cos(theta) - 2)) < 1e-14


def test_q_conjugate_symmetry_on_circle():
    # real couplings: conj(q(e^{i t})) = q(e^{-i t}), so |g| = 1 on the circle
    model = make_custom_model((-2, 1, 0.25), (1, 0.125), 0.5)
    q = build_q(model)
    for theta in np.linspace(0.1, 3.0, 7):
        assert abs(np.conj(q(np.exp(1j * theta))) - q(np.exp(-1j * theta))) < 1e-14


def test_coefficient_reflection_swaps_b_sign():
    # coefficient k of z^{2n} p(1/z) equals coefficient 2n-k of p with b -> -b
    rng = np.random.default_rng(1)
    for _ in range(5):
        a = tuple(rng.normal(size=3))
        b = tuple(rng.normal(size=2))
        try:
            model = make_custom_model(a, b, 0.7)
            flipped = make_custom_model(a, tuple(-x for x in b), 0.7)
        except DegenerateModel:
            continue
        c = build_p(model).coeffs
        c_flip = build_p(flipped).coeffs
        assert np.allclose(c[::-1], c_flip, atol=1e-14)


def test_overall_scale_cancels_in_g():
    base = make_custom_model((-2, 1, 0.25), (1, 0.125), 0.5)
    scaled = make_custom_model(tuple(3 * x for x in base.a),
                               tuple(3 * x for x in base.b), 0.5)
    s1 = build_symbol(base)
    s2 = build_symbol(scaled)
    z = np.array([0.1 + 0.2j, 2.0 + 1.0j, -1.5 + 0.4j])
    assert np.max(np.abs(s1.eval_g(z) - s2.eval_g(z))) < 1e-12


def test_model_from_roots_round_trip():
    roots = [2.2, 3.0, 0.795 * np.exp(0.5j), 0.795 * np.exp(-0.5j)]
    model = make_model_from_roots(roots)
    got = find_roots(build_p(model))
    for r in roots:
        assert np.min(np.abs(got - r)) < 1e-10


def test_model_from_dict_presets_and_raw():
    m1 = model_from_dict({"preset": "xy", "alpha": 0.8, "gamma": 0.5})
    assert m1.a == (-2.0, 0.8)
    m2 = model_from_dict({"a": [-2, 1, 0.25], "b": [1, 0.125], "gamma": 0.5})
    assert m2.n == 2
    with pytest.raises(DegenerateModel):
        model_from_dict({"preset": "nope", "alpha": 1.0})
