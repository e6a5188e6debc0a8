"""Fundamental domain of the plane stabilizer H and canonical coset keys.

H = PSL_2(Z) u iota*PSL_2(Z) acts on the plane P = {x2 = 0}, viewed as
the upper half-plane z = x + i*t with t = e^u, as PGL_2(Z): real
matrices by Mobius maps and iota-twisted matrices by z -> m(-conj z).
Its fundamental domain S is the modular domain folded by x -> -x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussInt, GMatrix
from .geometry import Point, moebius_act, to_sector

KEY_GRID = 1e-7
MAX_REDUCTION_STEPS = 100_000


@dataclass(frozen=True, slots=True)
class PlanePoint:
    x: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"plane point needs t > 0, got t={self.t}")

    def as_point(self) -> Point:
        return Point(self.x, 0.0, self.t)


@dataclass(frozen=True, slots=True)
class CosetKey:
    x_r: float
    u_r: float
    v_abs: float

    def cell(self) -> tuple[int, int, int]:
        return tuple(int(round(c / KEY_GRID)) for c in (self.x_r, self.u_r, self.v_abs))


class ReductionError(RuntimeError):
    pass


def plane_element(m: tuple[int, int, int, int]) -> GMatrix:
    """The element of H acting on P by the PGL_2(Z) matrix m.

    det m = 1 acts holomorphically; det m = -1 acts by z -> m(conj z),
    which is realized in PSL_2(Z[i]) by i*m.
    """
    a, b, c, d = m
    det = a * d - b * c
    if det == 1:
        return GMatrix.from_ints(a, b, c, d)
    if det == -1:
        return GMatrix(*(GaussInt(0, e) for e in (a, b, c, d)))
    raise ValueError(f"not in PGL_2(Z): det={det}")


def reduce_plane_raw(x: float, t: float) -> tuple[float, float, tuple[int, int, int, int], int]:
    """Reduce z = x + i t into S; returns (x', t', m, inversions) with m in PGL_2(Z).

    Ties: translations land in (-1/2, 1/2], inversion only strictly inside
    the unit circle, and the final fold makes x' >= 0.
    """
    a, b, c, d = 1, 0, 0, 1
    inversions = 0
    for _ in range(MAX_REDUCTION_STEPS):
        k = math.ceil(x - 0.5)
        if k:
            x -= k
            a, b = a - k * c, b - k * d
        r2 = x * x + t * t
        if r2 >= 1.0:
            break
        x, t = -x / r2, t / r2
        a, b, c, d = -c, -d, a, b
        inversions += 1
    else:
        raise ReductionError(f"plane reduction did not terminate within {MAX_REDUCTION_STEPS} steps")
    if x < 0:
        x = -x
        a, b = -a, -b
    return x, t, (a, b, c, d), inversions


def reduce_plane(q: PlanePoint) -> tuple[PlanePoint, GMatrix]:
    x, t, m, _ = reduce_plane_raw(q.x, q.t)
    return PlanePoint(x, t), plane_element(m)


def canonical_representative(g: GMatrix, p: Point) -> GMatrix:
    """The element h*g of the coset Hg whose orbit point projects into S."""
    s = to_sector(moebius_act(g, p))
    _, _, m, _ = reduce_plane_raw(s.x, math.exp(s.u))
    return (plane_element(m) @ g).canonical()


def coset_key(g: GMatrix, p: Point) -> CosetKey:
    """Quantized (x, u, |v|) of the reduced orbit point of the coset Hg."""
    s = to_sector(moebius_act(canonical_representative(g, p), p))
    return CosetKey(*(round(c / KEY_GRID) * KEY_GRID for c in (s.x, s.u, abs(s.v))))


def area_S(quadrature_n: int = 10_000, folded: bool = True) -> tuple[float, float]:
    """Hyperbolic area of the reduced domain by a 2-d midpoint rule.

    The domain {0 <= x <= 1/2, x^2 + t^2 >= 1} (or |x| <= 1/2 unfolded) is
    mapped to the unit square via t = h(x) + s/(1-s), h(x) = sqrt(1-x^2).
    The error estimate compares against the rule with half the panels.
    """
    if quadrature_n < 100:
        raise ValueError("quadrature_n must be at least 100")

    def rule(n):
        lo = 0.0 if folded else -0.5
        hx = (0.5 - lo) / n
        xs = lo + hx * (np.arange(n) + 0.5)
        ss = (np.arange(n) + 0.5) / n
        total = 0.0
        for chunk in np.array_split(xs, max(1, n // 1000)):
            h = np.sqrt(1.0 - chunk * chunk)[:, None]
            # dt/t^2 with dt = ds/(1-s)^2 becomes ds / (h(1-s) + s)^2
            total += np.sum(1.0 / (h * (1.0 - ss) + ss) ** 2)
        return total * hx / n

    full = rule(quadrature_n)
    half = rule(quadrature_n // 2)
    return full, abs(full - half) / 3.0
