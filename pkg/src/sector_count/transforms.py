"""Special functions and integral transforms for sector counting.

Test functions f are even profiles of the variable w = arcsinh(tan v),
so that f(cosh^2 w) in the usual notation is ``profile(w)`` here and an
orbit point with sec v = sigma contributes ``profile(arccosh(sigma))``.
Every profile exposes ``support`` (half-width of its support) and
``knots`` (non-negative break points) for the quadrature routines.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import PPoly


class QuadratureError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# spectral parameters and xi


@dataclass(frozen=True)
class SpectralParam:
    """s with lambda = s(2 - s) and s = 1 + i t."""

    s: complex
    lam: complex = field(init=False)
    t: complex = field(init=False)

    def __post_init__(self):
        s = complex(self.s)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "lam", s * (2 - s))
        object.__setattr__(self, "t", (s - 1) / 1j)

    @classmethod
    def from_lambda(cls, lam: float) -> SpectralParam:
        # 1 - lambda = (s - 1)^2; principal root keeps s - 1 real >= 0 or on +i R
        return cls(1 + cmath.sqrt(1 - lam))

    @classmethod
    def from_t(cls, t: complex) -> SpectralParam:
        return cls(1 + 1j * t)

    @property
    def lambda_(self) -> float:
        return self.lam.real


def _realify(z):
    z = np.asarray(z)
    if np.all(np.abs(z.imag) <= 1e-14 * np.maximum(1.0, np.abs(z.real))):
        z = z.real
    return z if z.ndim else z[()]


def xi(param: SpectralParam, v):
    """cosh((s-1) arcsinh tan v) / sec v, the even solution of the sector ODE with xi(0) = 1."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) >= np.pi / 2):
        raise ValueError("xi needs |v| < pi/2")
    w = np.arcsinh(np.tan(v))
    return _realify(np.cos(v) * np.cosh((param.s - 1) * w))


def xi_w(param: SpectralParam, w):
    """xi in the variable w (tan v = sinh w): cosh((s-1) w) / cosh w."""
    w = np.asarray(w, dtype=float)
    return _realify(np.cosh((param.s - 1) * w) / np.cosh(w))


def _d1_d2(f: Callable, x: np.ndarray, h: float):
    """Fourth-order central differences for f' and f''."""
    fm2, fm1, f0, fp1, fp2 = (f(x + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return d1, d2


def xi_ode_residual(param: SpectralParam, v: np.ndarray, step: float = 1e-3) -> np.ndarray:
    """cos^2 v xi'' + sin v cos v xi' + lambda xi on the grid v, by finite differences."""
    v = np.asarray(v, dtype=float)
    d1, d2 = _d1_d2(lambda z: xi(param, z), v, step)
    c, s = np.cos(v), np.sin(v)
    return c * c * d2 + s * c * d1 + param.lam * xi(param, v)


def xi_w_ode_residual(param: SpectralParam, w: np.ndarray, step: float = 1e-3) -> np.ndarray:
    """xi'' + 2 tanh w xi' + lambda xi for the w-form."""
    w = np.asarray(w, dtype=float)
    d1, d2 = _d1_d2(lambda z: xi_w(param, z), w, step)
    return d2 + 2 * np.tanh(w) * d1 + param.lam * xi_w(param, w)


@dataclass
class XiBoundsReport:
    lam: float
    max_abs_violation: float
    max_lower_violation: float
    grid_n: int

    @property
    def passed(self) -> bool:
        return max(self.max_abs_violation, self.max_lower_violation) <= 1e-12


def xi_bounds_check(param: SpectralParam, grid_n: int = 1000) -> XiBoundsReport:
    """|xi| <= 1 and xi >= 1 - (2 + lambda)/2 tan^2 v on v in [0, pi/2 - 1e-3]."""
    lam = param.lam
    if abs(lam.imag) > 1e-12 or lam.real < -1e-12:
        raise ValueError("bounds hold for real lambda >= 0")
    lam = lam.real
    v = np.linspace(0.0, np.pi / 2 - 1e-3, grid_n)
    vals = np.real(xi(param, v))
    upper = np.max(np.abs(vals) - 1.0)
    lower = np.max(1.0 - (2.0 + lam) / 2.0 * np.tan(v) ** 2 - vals)
    return XiBoundsReport(lam, max(float(upper), 0.0), max(float(lower), 0.0), grid_n)


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class Indicator:
    """1 on |w| <= T."""

    T: float

    @classmethod
    def from_X(cls, X: float) -> Indicator:
        """The sharp cutoff sec v <= X."""
        return cls(math.acosh(X))

    @property
    def support(self) -> float:
        return self.T

    @property
    def knots(self) -> tuple[float, ...]:
        return (self.T,)

    def __call__(self, w):
        return np.where(np.abs(w) <= self.T, 1.0, 0.0)


@dataclass(frozen=True)
class BoxConvolution:
    """1_[-a,a] * 1_[-b,b]: a trapezoid of height 2 min(a, b)."""

    a: float
    b: float

    @property
    def support(self) -> float:
        return self.a + self.b

    @property
    def knots(self) -> tuple[float, ...]:
        return (abs(self.a - self.b), self.a + self.b)

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return np.clip(np.minimum(self.a, w + self.b) - np.maximum(-self.a, w - self.b), 0.0, None)


@dataclass(frozen=True)
class Scaled:
    alpha: float
    base: object

    @property
    def support(self) -> float:
        return self.base.support

    @property
    def knots(self) -> tuple[float, ...]:
        return self.base.knots

    def __call__(self, w):
        return self.alpha * self.base(w)


def _triangle_cdf(x, width):
    """CDF of chi*chi, the unit-mass triangle on [-2 width, 2 width]."""
    x = np.asarray(x, dtype=float)
    h = 2 * width
    left = (x + h) ** 2 / (2 * h * h)
    right = 1.0 - (h - x) ** 2 / (2 * h * h)
    return np.where(x <= -h, 0.0, np.where(x <= 0, left, np.where(x < h, right, 1.0)))


@dataclass(frozen=True)
class SmoothingProfile:
    """f^{+-}: a sharp cutoff at A = arcsinh U smoothed by two boxes of half-width ``width``.

    plus:  1 for |w| <= A, 0 for |w| >= A + 4 width.
    minus: 1 for |w| <= A - 4 width, 0 for |w| >= A.
    Both are even and C^1, quadratic between consecutive knots.
    """

    U: float
    width: float
    sign: str = "plus"
    anchor: float | None = None

    def __post_init__(self):
        if not 0 < self.width < 1:
            raise ValueError("width must lie in (0, 1)")
        if self.U < 0:
            raise ValueError("U must be non-negative")
        if self.sign not in ("plus", "minus"):
            raise ValueError("sign must be 'plus' or 'minus'")
        if self.anchor is None:
            object.__setattr__(self, "anchor", math.asinh(self.U))

    @classmethod
    def for_count(cls, X: float, width: float, sign: str) -> SmoothingProfile:
        """Profile bracketing the sharp count at X; anchored at arccosh X exactly."""
        return cls(math.sqrt(X * X - 1), width, sign, anchor=math.acosh(X))

    @property
    def X(self) -> float:
        return math.hypot(self.U, 1.0)

    @property
    def half_width(self) -> float:
        """Half-width L of the box before smoothing."""
        return self.anchor + 2 * self.width if self.sign == "plus" else self.anchor - 2 * self.width

    @property
    def _knots3(self) -> tuple[float, float, float]:
        h = 2 * self.width
        if self.sign == "plus":
            k0 = self.anchor
            return k0, k0 + h, k0 + 2 * h
        k2 = self.anchor
        return k2 - 2 * h, k2 - h, k2

    @property
    def support(self) -> float:
        L = self.half_width
        if L <= 0:
            return 0.0
        return self._knots3[2]

    @property
    def knots(self) -> tuple[float, ...]:
        L, h = self.half_width, 2 * self.width
        if L <= 0:
            return ()
        return tuple(sorted({abs(L - h), L, L + h}))

    def __call__(self, w):
        w = np.abs(np.asarray(w, dtype=float))
        L, h = self.half_width, 2 * self.width
        if L <= 0:
            return np.zeros_like(w)[()] if w.ndim == 0 else np.zeros_like(w)
        if L < h:
            return _triangle_cdf(w + L, self.width) - _triangle_cdf(w - L, self.width)
        k0, k1, k2 = self._knots3
        q = 2 * h * h
        out = np.where(w <= k0, 1.0,
                       np.where(w <= k1, 1.0 - (w - k0) ** 2 / q,
                                np.where(w < k2, (k2 - w) ** 2 / q, 0.0)))
        return out if out.ndim else out[()]

    def to_ppoly(self) -> PPoly:
        """The profile on [0, support] as a scipy piecewise polynomial."""
        bps = np.array(sorted({0.0, *self.knots}))
        coeffs = np.zeros((3, len(bps) - 1))
        for j, (lo, hi) in enumerate(zip(bps[:-1], bps[1:])):
            xs = np.array([lo, 0.5 * (lo + hi), hi])
            coeffs[:, j] = np.polyfit(xs - lo, self(xs), 2)
        return PPoly(coeffs, bps)


def smoothing_pair(X: float, width: float) -> tuple[SmoothingProfile, SmoothingProfile]:
    return SmoothingProfile.for_count(X, width, "minus"), SmoothingProfile.for_count(X, width, "plus")


# ---------------------------------------------------------------------------
# d- and c-transforms


def _panels(support: float, knots: Sequence[float]) -> list[float]:
    pts = sorted({0.0, support, *(k for k in knots if 0.0 < k < support)})
    return pts


def _quad(fn: Callable[[float], complex], pts: list[float], tol: float, limit: int) -> complex:
    total = 0.0 + 0.0j
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        val, err, info = integrate.quad(fn, lo, hi, epsabs=tol, epsrel=tol, limit=limit,
                                        complex_func=True, full_output=True)
        for part in ("real", "imag"):
            ier = info[part][-1] if isinstance(info[part], tuple) and len(info[part]) > 3 else 0
            if ier not in (0, None) and abs(err) > tol * max(1.0, abs(val)):
                raise QuadratureError(f"quadrature on [{lo}, {hi}] stopped at error estimate {err:.3g}")
        if abs(err) > max(tol, tol * abs(val)) * 10:
            raise QuadratureError(f"quadrature on [{lo}, {hi}] reached only {err:.3g}")
        total += val
    return total


def d_transform(f, s: complex, quad_tol: float = 1e-10, limit: int = 2000) -> complex:
    """d(f, s) = int_R f(w) cosh(s w) dw for an even profile f."""
    support = float(f.support)
    if support <= 0:
        return 0j
    pts = _panels(support, f.knots)
    s = complex(s)
    val = _quad(lambda w: complex(f(w)) * cmath.cosh(s * w), pts, quad_tol / 2, limit)
    return 2 * val


def sinhc(z: complex) -> complex:
    """sinh(z)/z, with the series near 0."""
    z = complex(z)
    if abs(z) < 1e-4:
        z2 = z * z
        return 1 + z2 / 6 + z2 * z2 / 120
    return cmath.sinh(z) / z


def d_indicator_closed(T: float, s: complex) -> complex:
    """d(1_[-T,T], s) = 2 sinh(sT)/s."""
    return 2 * T * sinhc(complex(s) * T)


def d_box_closed(half_width: float, width: float, s: complex) -> complex:
    """d of 1_[-L,L] * chi * chi: (2 sinh(sL)/s) (sinh(s width)/(s width))^2."""
    s = complex(s)
    return 2 * half_width * sinhc(s * half_width) * sinhc(s * width) ** 2


def d_plus_closed(U: float, width: float, s: complex) -> complex:
    """8 sinh(s(arcsinh U + 2 width)) sinh^2(s width) / ((2 width)^2 s^3), with its s -> 0 limit."""
    if not 0 < width < 1 or U <= 0:
        raise ValueError("need 0 < width < 1 and U > 0")
    return d_box_closed(math.asinh(U) + 2 * width, width, s)


def d_minus_closed(U: float, width: float, s: complex) -> complex:
    L = math.asinh(U) - 2 * width
    if L <= 0:
        return 0j
    return d_box_closed(L, width, s)


def c_transform(f, t: complex, quad_tol: float = 1e-10, route: str = "d") -> complex:
    """c(f, t) with s = 1 + i t.

    route "d" uses 4c = d(f, s) + d(f, 2 - s); route "r" integrates
    int_0^inf f(1 + r^2) cosh((s-1) arcsinh r) dr directly.
    """
    s = 1 + 1j * complex(t)
    if route == "d":
        return (d_transform(f, s, quad_tol) + d_transform(f, 2 - s, quad_tol)) / 4
    if route != "r":
        raise ValueError("route must be 'd' or 'r'")
    support = float(f.support)
    if support <= 0:
        return 0j
    pts = [math.sinh(k) for k in _panels(support, f.knots)]

    def integrand(r):
        w = math.asinh(r)
        return complex(f(w)) * cmath.cosh((s - 1) * w)

    return _quad(integrand, pts, quad_tol, 2000)


def c_plus_closed(U: float, width: float, t: complex) -> complex:
    s = 1 + 1j * complex(t)
    return (d_plus_closed(U, width, s) + d_plus_closed(U, width, 2 - s)) / 4


@dataclass
class OscillatoryReport:
    width: float
    t: np.ndarray
    a: np.ndarray
    b: np.ndarray
    envelope: np.ndarray
    C: float
    regime: np.ndarray  # True where |t| width >= 1


def oscillatory_coefficients(U: float, width: float, t: float, X2: float | None = None) -> tuple[complex, complex]:
    """Solve c(f+, t) = a X^{1+it} + b X^{1-it} from two values of X at fixed (t, width)."""
    X1 = math.hypot(U, 1.0)
    if X2 is None:
        X2 = X1 * math.exp(math.pi / (2 * abs(t)))
    M = np.array([[X1 ** (1 + 1j * t), X1 ** (1 - 1j * t)],
                  [X2 ** (1 + 1j * t), X2 ** (1 - 1j * t)]])
    if abs(math.sin(t * math.log(X2 / X1))) < 1e-3:
        raise ValueError("ill-conditioned: X values too close for this t")
    rhs = np.array([c_plus_closed(U, width, t), c_plus_closed(math.sqrt(X2 * X2 - 1), width, t)])
    a, b = np.linalg.solve(M, rhs)
    return complex(a), complex(b)


def oscillatory_coeff_check(U: float, width: float, t_grid: Sequence[float]) -> OscillatoryReport:
    """Fit the single constant C in |a|, |b| <= C min(|t|^-1, |t|^-3 width^-2) over t_grid."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(np.abs(t) < 1):
        raise ValueError("t_grid must satisfy |t| >= 1")
    coeffs = [oscillatory_coefficients(U, width, tk) for tk in t]
    a = np.array([c[0] for c in coeffs])
    b = np.array([c[1] for c in coeffs])
    env = np.minimum(1 / np.abs(t), 1 / (np.abs(t) ** 3 * width ** 2))
    C = float(np.max(np.maximum(np.abs(a), np.abs(b)) / env))
    return OscillatoryReport(width, t, a, b, env, C, np.abs(t) * width >= 1)


# ---------------------------------------------------------------------------
# inverse Selberg transform of a Gaussian times a cosine


def _phi_derivs(y: float, a: float) -> tuple[float, float]:
    """phi'(y) and phi'''(y) for phi(y) = y exp(-a y^2)."""
    e = math.exp(-a * y * y)
    return e * (1 - 2 * a * y * y), e * (-6 * a + 24 * a * a * y ** 2 - 8 * a ** 3 * y ** 4)


def selberg_inverse_gaussian(T: float, r: float, x: float) -> float:
    """k(cosh x) for h(1 + t^2) = exp(-t^2/(2T)^2) cos(r t).

    k(cosh x) = (2 sqrt(pi) / (4 pi^2)) T^3 g(x),
    g(x) = ((x+r) e^{-T^2 (x+r)^2} + (x-r) e^{-T^2 (x-r)^2}) / sinh x,
    and k(1) = T^3 u(rT) / (2 pi^{3/2}) with u(y) = 2 e^{-y^2}(1 - 2y^2).
    """
    if T <= 0 or r < 0 or x < 0:
        raise ValueError("need T > 0, r >= 0, x >= 0")
    a = T * T
    pref = 2 * math.sqrt(math.pi) / (4 * math.pi ** 2) * T ** 3
    if x == 0:
        u = 2 * math.exp(-(r * T) ** 2) * (1 - 2 * (r * T) ** 2)
        return T ** 3 * u / (2 * math.pi ** 1.5)
    if x * (1 + T) < 1e-3:
        # numerator phi(x+r) + phi(x-r) = 2 x phi'(r) + x^3 phi'''(r)/3 + ...
        d1, d3 = _phi_derivs(r, a)
        g = (2 * d1 + x * x * d3 / 3) / (1 + x * x / 6)
        return pref * g
    g = ((x + r) * math.exp(-a * (x + r) ** 2) + (x - r) * math.exp(-a * (x - r) ** 2)) / math.sinh(x)
    return pref * g


def selberg_k1_bound(T: float, r: float) -> float:
    """min(T^3, r^-3), the envelope for k(1)."""
    return T ** 3 if r == 0 else min(T ** 3, r ** -3)


def selberg_inverse_numeric(T: float, r: float, x: float, *, cutoff: float = 12.0, order: int = 20) -> float:
    """k(cosh x) from -2 pi k(X) = d/dX (1/2 pi) int h(1+t^2) e^{-i t arccosh X} dt.

    The t-integral runs over |t| <= cutoff*T on Gauss-Legendre panels of
    length <= min(0.1, pi/(4(x+r+1))); the X-derivative is taken by the
    complex-step method in x (dX = sinh x dx).
    """
    if x <= 0:
        raise ValueError("numeric inversion needs x > 0")
    panel = min(0.1, math.pi / (4 * (x + r + 1)))
    tmax = cutoff * T
    n_pan = int(math.ceil(tmax / panel))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, tmax, n_pan + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    tt = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    ww = (half[:, None] * weights[None, :]).ravel()
    hstep = 1e-30
    rho = complex(x, hstep)
    # (1/2pi) int_R h e^{-i t rho} dt = (1/pi) int_0^inf h cos(t rho) dt since h is even
    F = np.sum(ww * np.exp(-tt ** 2 / (4 * T * T)) * np.cos(r * tt) * np.cos(tt * rho)) / math.pi
    dF_drho = F.imag / hstep
    return -dF_drho / (2 * math.pi * math.sinh(x))
