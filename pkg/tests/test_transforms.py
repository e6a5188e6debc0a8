import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sector_count import transforms as tf


def mp_d_transform(f, s):
    """Independent high-precision d-transform: mpmath quadrature split at the knots."""
    pts = sorted({0.0, f.support, *f.knots})
    val = mpmath.quad(lambda w: float(f(float(w))) * mpmath.cosh(s * w), pts)
    return complex(2 * val)


# ---------------------------------------------------------------------------
# spectral parameter and xi


def test_spectral_param_conversions():
    P = tf.SpectralParam.from_lambda(5.0)
    assert P.s == pytest.approx(1 + 2j)
    assert P.lam == pytest.approx(5.0)
    assert tf.SpectralParam.from_t(2.0).lam == pytest.approx(5.0)
    assert tf.SpectralParam.from_lambda(0.75).s == pytest.approx(1.5)


@pytest.mark.parametrize("lam", [0.0, 0.3, 1.0, 7.0, 50.0])
def test_xi_satisfies_ode(lam):
    P = tf.SpectralParam.from_lambda(lam)
    v = np.linspace(-1.3, 1.3, 1000)
    assert np.max(np.abs(tf.xi_ode_residual(P, v))) <= 1e-6 * (1 + lam)
    w = np.linspace(-4, 4, 500)
    assert np.max(np.abs(tf.xi_w_ode_residual(P, w))) <= 1e-6 * (1 + lam)


@given(st.floats(-1.5, 1.5), st.floats(0, 60))
def test_xi_forms_agree(v, lam):
    P = tf.SpectralParam.from_lambda(lam)
    assert tf.xi(P, v) == pytest.approx(tf.xi_w(P, math.asinh(math.tan(v))), rel=1e-9, abs=1e-12)


def test_xi_even_and_normalized():
    P = tf.SpectralParam.from_lambda(3.0)
    assert tf.xi(P, 0.0) == 1.0
    assert tf.xi(P, 0.7) == pytest.approx(tf.xi(P, -0.7))
    assert isinstance(tf.xi(P, 0.7), float)


def test_xi_closed_form_against_mpmath_ode():
    # integrate cos^2 xi'' + sin cos xi' + lam xi = 0 from xi(0)=1, xi'(0)=0 at high precision
    lam = 2.5
    mpmath.mp.dps = 30
    f = lambda v, y: [y[1], -(mpmath.sin(v) * mpmath.cos(v) * y[1] + lam * y[0]) / mpmath.cos(v) ** 2]  # noqa: E731
    sol = mpmath.odefun(f, 0, [1, 0])
    for v in (0.3, 0.8, 1.2):
        assert float(sol(v)[0]) == pytest.approx(tf.xi(tf.SpectralParam.from_lambda(lam), v), rel=1e-10)
    mpmath.mp.dps = 15


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 5.0, 50.0])
def test_xi_bounds(lam):
    rep = tf.xi_bounds_check(tf.SpectralParam.from_lambda(lam))
    assert rep.passed, rep


def test_xi_rejects_endpoint():
    with pytest.raises(ValueError):
        tf.xi(tf.SpectralParam.from_lambda(1.0), math.pi / 2)


# ---------------------------------------------------------------------------
# profiles


def test_smoothing_profile_shape():
    f = tf.SmoothingProfile(10.0, 0.1, "plus")
    A = math.asinh(10.0)
    assert f(A) == 1.0 and f(A + 0.4) == 0.0 and f(A + 0.2) == pytest.approx(0.5)
    g = tf.SmoothingProfile(10.0, 0.1, "minus")
    assert g(A - 0.4) == 1.0 and g(A) == 0.0
    w = np.linspace(0, A + 1, 2001)
    assert np.all(g(w) <= f(w))
    assert np.all(np.diff(f(w)) <= 1e-15)


def test_profile_is_C1():
    f = tf.SmoothingProfile(5.0, 0.2, "plus")
    for k in f.knots:
        h = 1e-7
        left = (f(k) - f(k - h)) / h
        right = (f(k + h) - f(k)) / h
        assert left == pytest.approx(right, abs=1e-5)


def test_profile_matches_convolution_quadrature():
    f = tf.SmoothingProfile(3.0, 0.15, "plus")
    L, d = f.half_width, f.width
    for w in (0.0, L - 0.2, L - 0.05, L, L + 0.1, L + 0.25):
        # (1_[-L,L] * chi * chi)(w) with chi = 1_[-d,d]/(2d)
        cuts = sorted({-2 * d, 0.0, 2 * d, *(c for c in (w - L, w + L) if -2 * d < c < 2 * d)})
        val = mpmath.quad(lambda t: max(0.0, 2 * d - abs(t)) / (4 * d * d) * (abs(w - t) <= L), cuts)
        assert f(w) == pytest.approx(float(val), abs=1e-10)


def test_minus_profile_with_small_support():
    f = tf.SmoothingProfile(0.12, 0.05, "minus")
    assert 0 < f.half_width < 2 * f.width
    w = np.linspace(0, f.support, 50)
    assert np.all((0 <= f(w)) & (f(w) <= 1))


def test_to_ppoly():
    f = tf.SmoothingProfile(4.0, 0.1, "plus")
    pp = f.to_ppoly()
    w = np.linspace(0, f.support, 301)
    assert np.allclose(pp(w), f(w), atol=1e-12)


def test_profile_validation():
    with pytest.raises(ValueError):
        tf.SmoothingProfile(4.0, 1.5)
    with pytest.raises(ValueError):
        tf.SmoothingProfile(4.0, 0.1, "both")


# ---------------------------------------------------------------------------
# d- and c-transforms


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 4), st.floats(-2, 2), st.floats(-15, 15))
def test_indicator_transform(T, sr, si):
    s = complex(sr, si)
    ref = tf.d_indicator_closed(T, s)
    assert abs(tf.d_transform(tf.Indicator(T), s) - ref) <= 1e-8 * abs(ref)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 2), st.floats(0.2, 2), st.floats(-2, 2), st.floats(-10, 10))
def test_convolution_multiplicative(a, b, sr, si):
    s = complex(sr, si)
    lhs = tf.d_transform(tf.BoxConvolution(a, b), s)
    rhs = tf.d_transform(tf.Indicator(a), s) * tf.d_transform(tf.Indicator(b), s)
    assert abs(lhs - rhs) <= 1e-8 * abs(rhs)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 2), st.floats(0, 2), st.floats(-5, 5))
def test_linearity(alpha, T, sr, si):
    s = complex(sr, si)
    f = tf.Indicator(T)
    assert tf.d_transform(tf.Scaled(alpha, f), s) == pytest.approx(alpha * tf.d_transform(f, s), rel=1e-9, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(1, 100), st.floats(0.02, 0.5), st.floats(0, 2), st.floats(-30, 30))
def test_d_plus_closed(U, width, sr, si):
    s = complex(sr, si)
    ref = tf.d_plus_closed(U, width, s)
    assert abs(tf.d_transform(tf.SmoothingProfile(U, width, "plus"), s) - ref) <= 1e-8 * abs(ref)


def test_d_plus_closed_against_mpmath():
    for U, w, s in [(3.0, 0.2, 1 + 4j), (40.0, 0.1, 2.0), (7.0, 0.3, 0.5 - 9j)]:
        f = tf.SmoothingProfile(U, w, "plus")
        ref = mp_d_transform(f, s)
        assert abs(tf.d_plus_closed(U, w, s) - ref) <= 1e-10 * abs(ref)


def test_d_plus_at_zero():
    U, w = 5.0, 0.1
    assert tf.d_plus_closed(U, w, 0) == pytest.approx(2 * (math.asinh(U) + 2 * w))
    assert tf.d_plus_closed(U, w, 1e-9) == pytest.approx(tf.d_plus_closed(U, w, 0), rel=1e-12)


def test_d_minus_closed():
    f = tf.SmoothingProfile(6.0, 0.1, "minus")
    assert tf.d_transform(f, 1 + 2j) == pytest.approx(tf.d_minus_closed(6.0, 0.1, 1 + 2j), rel=1e-9)


def test_c_transform_routes_agree():
    f = tf.SmoothingProfile(8.0, 0.15, "plus")
    for t in (0.0, 1.3, 7.0, 0.5j):
        a = tf.c_transform(f, t, route="d")
        b = tf.c_transform(f, t, route="r")
        assert a == pytest.approx(b, rel=1e-8)
        assert a == pytest.approx(tf.c_plus_closed(8.0, 0.15, t), rel=1e-8)


def test_c_transform_is_real_on_tempered_line():
    f = tf.SmoothingProfile(8.0, 0.15, "plus")
    c = tf.c_transform(f, 3.3)
    assert abs(c.imag) <= 1e-10 * abs(c)


def test_oscillatory_coefficients_reconstruct():
    U, w, t = math.sqrt(30 ** 2 - 1), 30 ** -0.5, 4.0
    a, b = tf.oscillatory_coefficients(U, w, t)
    X = 30.0
    assert a * X ** (1 + 1j * t) + b * X ** (1 - 1j * t) == pytest.approx(tf.c_plus_closed(U, w, t), rel=1e-9)


def test_oscillatory_envelope_constant():
    rep = tf.oscillatory_coeff_check(math.sqrt(30 ** 2 - 1), 30 ** -0.5, [1, 2, 3, 5, 8, 13, 21, 34, 55])
    assert 0 < rep.C < 2
    assert rep.regime.any() and (~rep.regime).any()


# ---------------------------------------------------------------------------
# Selberg inversion


def mp_selberg(T, r, x):
    """k(cosh x) from -(1/2 pi) dF/dX, F by mpmath quadrature and mpmath differentiation."""
    mpmath.mp.dps = 30
    F = lambda rho: mpmath.quad(  # noqa: E731
        lambda t: mpmath.exp(-t * t / (4 * T * T)) * mpmath.cos(r * t) * mpmath.cos(rho * t),
        mpmath.linspace(0, 20 * T, int(40 * T) + 1)) / mpmath.pi
    dF = mpmath.diff(F, x)
    val = -dF / (2 * mpmath.pi * mpmath.sinh(x))
    mpmath.mp.dps = 15
    return float(val)


@pytest.mark.parametrize("T,r,x", [(1.0, 0.0, 0.5), (1.0, 2.0, 1.7), (5.0, 1.0, 1.2)])
def test_selberg_against_mpmath(T, r, x):
    assert tf.selberg_inverse_gaussian(T, r, x) == pytest.approx(mp_selberg(T, r, x), rel=1e-9)


def test_selberg_numeric_route():
    for T, r, x in [(1.0, 1.0, 0.4), (5.0, 2.0, 2.1), (10.0, 1.0, 1.05)]:
        assert tf.selberg_inverse_numeric(T, r, x) == pytest.approx(tf.selberg_inverse_gaussian(T, r, x), rel=1e-8)


def test_selberg_small_x_series_continuous():
    for T, r in [(1.0, 0.0), (5.0, 1.0), (10.0, 0.0)]:
        x = 0.9e-3 / (1 + T)
        series = tf.selberg_inverse_gaussian(T, r, x)
        a = T * T
        direct = 2 * math.sqrt(math.pi) / (4 * math.pi ** 2) * T ** 3 * (
            (x + r) * math.exp(-a * (x + r) ** 2) + (x - r) * math.exp(-a * (x - r) ** 2)) / math.sinh(x)
        assert series == pytest.approx(direct, rel=1e-7, abs=1e-300)
        assert tf.selberg_inverse_gaussian(T, r, 0.0) == pytest.approx(series, rel=1e-4)


def test_selberg_k1_envelope():
    for T in (1.0, 5.0, 10.0):
        for r in (0.0, 0.5, 2.0):
            assert abs(tf.selberg_inverse_gaussian(T, r, 0.0)) <= tf.selberg_k1_bound(T, r)


def test_sinhc():
    assert tf.sinhc(0) == 1
    z = 0.3 + 0.2j
    assert tf.sinhc(z) == pytest.approx(cmath.sinh(z) / z)
    assert tf.sinhc(5e-5) == pytest.approx(math.sinh(5e-5) / 5e-5, rel=1e-15)
