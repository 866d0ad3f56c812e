"""Unit tests for the univariate jet calculus.

The hand-derived sigmoid derivative polynomials are checked against sympy's
symbolic differentiation, which is a fully independent derivation route.
"""

from __future__ import annotations

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from duosolve import jets

# ---------------------------------------------------------------------------
# Symbolic oracles, built once.
# ---------------------------------------------------------------------------

_z = sp.Symbol("z")
_sig = 1 / (1 + sp.exp(-_z))
_SIG_DERIVS = [sp.lambdify(_z, sp.diff(_sig, _z, m), "numpy") for m in range(4)]


def test_sigmoid_jet_matches_symbolic_derivatives():
    w, b = 3.7, -0.9
    x = np.linspace(-4.0, 4.0, 41)
    jet = jets.jet_sigmoid(w, b, x)
    for m in range(4):
        exact = (w**m) * _SIG_DERIVS[m](w * x + b)
        np.testing.assert_allclose(jet[m], exact, rtol=1e-12, atol=1e-14)


def test_sine_jet_matches_symbolic_derivatives():
    om, ph, xs = sp.symbols("om ph xs")
    expr = sp.sin(om * xs + ph)
    omega, phi = 11.3, 0.4
    x = np.linspace(0.0, 1.0, 17)
    jet = jets.jet_sin(omega, phi, x)
    for m in range(4):
        fn = sp.lambdify(xs, sp.diff(expr, xs, m).subs({om: omega, ph: phi}), "numpy")
        np.testing.assert_allclose(jet[m], fn(x), rtol=1e-12, atol=1e-12)


def test_sigmoid_is_stable_for_extreme_arguments():
    assert jets.sigmoid(800.0) == 1.0
    assert jets.sigmoid(-800.0) == 0.0
    jet = jets.jet_sigmoid(100.0, 0.0, np.array([-50.0, 50.0]))
    assert np.all(np.isfinite(jet.as_array()))
    # derivatives vanish where the sigmoid saturates
    assert jet[1][0] == 0.0 and jet[1][1] == 0.0


def test_sigmoid_scalar_returns_float():
    out = jets.sigmoid(0.0)
    assert isinstance(out, float) and out == 0.5


@given(
    st.floats(-5, 5), st.floats(-3, 3), st.floats(-20, 20), st.floats(-3, 3),
    st.floats(-2, 2),
)
@settings(max_examples=60, deadline=None)
def test_jet_mul_is_the_jet_of_the_product(w, b, omega, phi, x):
    """Leibniz truncation == differentiating sin*sigmoid symbolically."""
    prod = jets.jet_mul(jets.jet_sin(omega, phi, x), jets.jet_sigmoid(w, b, x))
    xs = sp.Symbol("xs")
    expr = sp.sin(omega * xs + phi) / (1 + sp.exp(-(w * xs + b)))
    for m in range(4):
        exact = float(sp.diff(expr, xs, m).subs(xs, x))
        assert prod[m] == pytest.approx(exact, rel=1e-9, abs=1e-9)


def test_jet_mul_commutes():
    a = jets.jet_sin(3.0, 0.2, 0.7)
    b = jets.jet_sigmoid(1.5, -0.4, 0.7)
    ab, ba = jets.jet_mul(a, b), jets.jet_mul(b, a)
    for m in range(4):
        assert ab[m] == ba[m]


def test_separable_partial_products():
    f = [jets.jet_sin(2.0, 0.0, 0.3), jets.jet_sigmoid(1.0, 0.0, 0.5),
         jets.jet_sin(4.0, 1.0, 0.9)]
    v = jets.separable_partial(f, (0, 0, 0))
    assert v == pytest.approx(f[0][0] * f[1][0] * f[2][0])
    v = jets.separable_partial(f, (1, 2, 0))
    assert v == pytest.approx(f[0][1] * f[1][2] * f[2][0])


def test_multi_index_validation():
    assert jets.check_multi_index([1, 2]) == (1, 2)
    with pytest.raises(ValueError):
        jets.check_multi_index((1, -1))
    with pytest.raises(ValueError):
        jets.check_multi_index((2, 2))  # total order 4
    with pytest.raises(ValueError):
        jets.separable_partial([jets.jet_sin(1, 0, 0.5)], (1, 1))


def test_jet_getitem_and_as_array():
    jet = jets.jet_sin(5.0, 0.0, np.array([0.1, 0.2]))
    arr = jet.as_array()
    assert arr.shape == (4, 2)
    for m in range(4):
        np.testing.assert_array_equal(arr[m], np.asarray(jet[m]))
