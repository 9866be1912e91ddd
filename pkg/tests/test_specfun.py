import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specpriv import specfun as sf

mpmath.mp.dps = 40

XS = np.concatenate([np.linspace(0.0, 6.0, 61), [0.001, 1e-8, 6.5, 8.0, 12.0, 20.0, 26.0]])


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("x", XS)
def test_erf_erfc_against_mpmath(x):
    assert rel(sf.erf(x), float(mpmath.erf(x))) < 1e-14 or abs(sf.erf(x) - float(mpmath.erf(x))) < 1e-16
    assert rel(sf.erfc(x), float(mpmath.erfc(x))) < 1e-12


@pytest.mark.parametrize("x", XS)
def test_erfcx_against_mpmath(x):
    ref = float(mpmath.exp(mpmath.mpf(x) ** 2) * mpmath.erfc(x))
    assert rel(sf.erfcx(x), ref) < 1e-12


@pytest.mark.parametrize("x", XS)
def test_dawson_and_erfi_against_mpmath(x):
    xm = mpmath.mpf(x)
    daw = float(mpmath.sqrt(mpmath.pi) / 2 * mpmath.exp(-xm * xm) * mpmath.erfi(xm))
    assert abs(sf.dawson(x) - daw) <= 1e-12 * max(abs(daw), 1e-300) + 1e-300
    if x * x < 700:
        assert rel(sf.erfi(x), float(mpmath.erfi(xm))) < 1e-13 or x == 0.0


def test_odd_symmetry():
    for x in (0.3, 2.5, 7.0):
        assert sf.erf(-x) == -sf.erf(x)
        assert sf.erfi(-x) == -sf.erfi(x)
        assert sf.dawson(-x) == -sf.dawson(x)
        assert sf.erfc(-x) == pytest.approx(2.0 - sf.erfc(x), rel=1e-15)


def test_erfi_overflow_is_signalled():
    with pytest.raises(OverflowError):
        sf.erfi(27.0)


def test_erfcx_rejects_negative():
    with pytest.raises(ValueError):
        sf.erfcx(-1.0)


@pytest.mark.parametrize("x", [0.0, 0.01, 0.5, 1.0, 4.0, 25.0, 300.0])
def test_upper_gamma_half(x):
    assert sf.upper_gamma_half(x) == pytest.approx(float(mpmath.gammainc(0.5, x)), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 26, allow_nan=False))
def test_erf_plus_erfc_is_one(x):
    assert sf.erf(x) + sf.erfc(x) == pytest.approx(1.0, abs=2e-16 * 4)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 5, allow_nan=False), st.floats(0.01, 3, allow_nan=False))
def test_erf_monotone(x, h):
    assert sf.erf(x + h) >= sf.erf(x)


# -------------------------------------------------------------- quadrature


@pytest.mark.parametrize("f, a, b, exact", [
    (math.sin, 0.0, math.pi, 2.0),
    (math.exp, -1.0, 2.0, math.e ** 2 - math.exp(-1)),
    (lambda x: x ** 5 - 3 * x, 0.0, 2.0, 64 / 6 - 6),
    (lambda x: math.sqrt(x), 0.0, 1.0, 2.0 / 3.0),
])
def test_integrate_known_integrals(f, a, b, exact):
    r = sf.integrate(f, a, b, tol=1e-11)
    assert r.value == pytest.approx(exact, abs=1e-9)
    assert r.evaluations > 0


def test_integrate_with_kink_knot():
    f = lambda x: math.exp(-abs(x - 0.7) / 0.3)
    exact = 0.3 * (2 - math.exp(-0.7 / 0.3) - math.exp(-0.3 / 0.3))
    r = sf.integrate(f, 0.0, 1.0, tol=1e-12, knots=(0.7,))
    assert r.value == pytest.approx(exact, rel=1e-11)


def test_integrate_degenerate_and_errors():
    assert sf.integrate(math.sin, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        sf.integrate(math.sin, 1.0, 0.0)
    with pytest.raises(sf.QuadratureError):
        sf.integrate(lambda x: 1.0 / x if x else 1e300, 0.0, 1.0, tol=1e-12, max_depth=10)


def test_integrate_against_mpmath_quad():
    f = lambda x: math.exp(-x * x) * math.cos(3 * x)
    ref = float(mpmath.quad(lambda x: mpmath.exp(-x * x) * mpmath.cos(3 * x), [0, 4]))
    assert sf.integrate(f, 0.0, 4.0, tol=1e-12).value == pytest.approx(ref, abs=1e-11)
