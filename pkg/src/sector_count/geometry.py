"""Upper half-space model of hyperbolic 3-space and the sector chart (x, u, v).

Points are p = (x1, x2, y) with y > 0.  The plane P is {x2 = 0}; the
sector chart measures the signed angle v between p and P, so that the
hyperbolic distance from p to P is arccosh(sec v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import GMatrix

CHART_MARGIN = 1e-3


@dataclass(frozen=True, slots=True)
class Point:
    x1: float
    x2: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"point must have y > 0, got y={self.y}")

    def as_tuple(self) -> tuple[float, float, float]:
        return self.x1, self.x2, self.y


@dataclass(frozen=True, slots=True)
class SectorCoords:
    x: float
    u: float
    v: float

    def __post_init__(self):
        if not abs(self.v) < math.pi / 2:
            raise ValueError(f"sector angle must lie in (-pi/2, pi/2), got v={self.v}")


def to_sector(p: Point) -> SectorCoords:
    if not p.y > 0:
        raise ValueError("to_sector needs y > 0")
    return SectorCoords(p.x1, 0.5 * math.log(p.x2 * p.x2 + p.y * p.y), math.atan(p.x2 / p.y))


def from_sector(s: SectorCoords) -> Point:
    if not abs(s.v) < math.pi / 2:
        raise ValueError("from_sector needs |v| < pi/2")
    r = math.exp(s.u)
    return Point(s.x, r * math.sin(s.v), r * math.cos(s.v))


def sec_v(p: Point) -> float:
    """sec v(p) = cosh of the distance from p to P."""
    return math.hypot(p.x2, p.y) / p.y


def moebius_act(g: GMatrix, p: Point) -> Point:
    a, b, c, d = (complex(e) for e in g.entries())
    z = complex(p.x1, p.x2)
    y2 = p.y * p.y
    cz_d = c * z + d
    den = abs(cz_d) ** 2 + abs(c) ** 2 * y2
    num = (a * z + b) * cz_d.conjugate() + a * c.conjugate() * y2
    w = num / den
    return Point(w.real, w.imag, p.y / den)


def pp_invariant(p: Point, q: Point) -> float:
    """delta(p, q) = cosh d(p, q)."""
    dz2 = (p.x1 - q.x1) ** 2 + (p.x2 - q.x2) ** 2
    return (dz2 + p.y * p.y + q.y * q.y) / (2.0 * p.y * q.y)


def project_to_plane(p: Point) -> Point:
    """Orthogonal projection along geodesics onto P = {x2 = 0}."""
    return Point(p.x1, 0.0, math.hypot(p.x2, p.y))


def _check_chart(s: SectorCoords) -> None:
    if abs(s.v) > math.pi / 2 - CHART_MARGIN:
        raise ValueError("chart degenerate: |v| too close to pi/2")


def _cartesian(x: float, u: float, v: float) -> np.ndarray:
    r = math.exp(u)
    return np.array([x, r * math.sin(v), r * math.cos(v)])


def _jacobian(s: SectorCoords, h: float) -> np.ndarray:
    base = np.array([s.x, s.u, s.v])
    jac = np.empty((3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        jac[:, k] = (_cartesian(*(base + e)) - _cartesian(*(base - e))) / (2 * h)
    return jac


def metric_tensor(s: SectorCoords) -> np.ndarray:
    """Closed-form metric in the sector chart: diag(e^{-2u}, 1, 1) / cos^2 v."""
    c2 = math.cos(s.v) ** 2
    return np.diag([math.exp(-2 * s.u), 1.0, 1.0]) / c2


def check_metric_tensor(s: SectorCoords, step: float = 1e-5, richardson: bool = False) -> float:
    """Max abs deviation between the pulled-back Cartesian metric and the closed form.

    The pullback uses a central-difference Jacobian of the chart, so the
    deviation is O(step^2) (O(step^4) with Richardson extrapolation).
    """
    _check_chart(s)

    def pulled_back(h):
        jac = _jacobian(s, h)
        y = math.exp(s.u) * math.cos(s.v)
        return jac.T @ jac / (y * y)

    g = pulled_back(step)
    if richardson:
        g = (4 * pulled_back(step / 2) - g) / 3
    return float(np.max(np.abs(g - metric_tensor(s))))


def _second(f, z0: np.ndarray, k: int, h: float) -> tuple[float, float]:
    e = np.zeros(3)
    e[k] = h
    fp, f0, fm = f(z0 + e), f(z0), f(z0 - e)
    return (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)


def sector_laplacian(s: SectorCoords, testfn: Callable[[float, float, float], float], step: float = 1e-4) -> float:
    """Laplacian in the sector chart by central differences."""
    _check_chart(s)
    F = lambda z: testfn(*_cartesian(*z))  # noqa: E731
    z0 = np.array([s.x, s.u, s.v])
    _, fxx = _second(F, z0, 0, step)
    fu, fuu = _second(F, z0, 1, step)
    fv, fvv = _second(F, z0, 2, step)
    cv, sv = math.cos(s.v), math.sin(s.v)
    return (math.exp(2 * s.u) * cv * cv * fxx + cv * cv * (fuu + fvv)
            - cv * cv * fu + sv * cv * fv)


def cartesian_laplacian(p: Point, testfn: Callable[[float, float, float], float], step: float = 1e-4) -> float:
    """y^2 (d11 + d22 + dyy) f - y dy f by central differences."""
    F = lambda z: testfn(*z)  # noqa: E731
    z0 = np.array(p.as_tuple())
    _, f11 = _second(F, z0, 0, step)
    _, f22 = _second(F, z0, 1, step)
    fy, fyy = _second(F, z0, 2, step)
    return p.y * p.y * (f11 + f22 + fyy) - p.y * fy


def check_laplacian(s: SectorCoords, testfn: Callable[[float, float, float], float],
                    step: float = 1e-4, richardson: bool = False) -> float:
    """|Laplacian in the sector chart - Cartesian Laplacian| at the same point."""
    p = from_sector(s)

    def diff(h):
        return sector_laplacian(s, testfn, h) - cartesian_laplacian(p, testfn, h)

    d = diff(step)
    if richardson:
        d = (4 * diff(step / 2) - d) / 3
    return abs(d)
