"""Averaged error-term experiments: radial and spatial mean squares of e(p, X)."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .counting import GroupConfig, _act_arrays, _small_matrices, count_sweep, count_sector, picard_config
from .geometry import Point

DEFAULT_SEED = 20240601
SPATIAL_PACKING = 0.02
MAX_REJECTIONS = 100_000
DEFAULT_REGION = ((0.0, 0.5), (0.0, 0.5), (0.9, 1.4))


class SpacingError(ValueError):
    pass


def default_seed() -> int:
    return int(os.environ.get("SECTOR_COUNT_SEED", DEFAULT_SEED))


@dataclass(frozen=True)
class ExperimentRecord:
    kind: str
    X: float
    sample_id: int
    sample_value: float
    err: float

    @property
    def err_sq(self) -> float:
        return self.err * self.err


@dataclass(frozen=True)
class SpacingSpec:
    R: int
    eps: float
    constraint_kind: str

    def validate(self, X: float) -> None:
        """Raise SpacingError naming the violated inequality."""
        if self.R < 1 or self.eps <= 0:
            raise SpacingError("need R >= 1 and eps > 0")
        if self.constraint_kind == "radial":
            if not self.R > X ** (2 / 3):
                raise SpacingError(f"radial spacing needs R > X^(2/3): R={self.R}, X^(2/3)={X ** (2 / 3):.6g}")
            ratio = self.R * self.eps / X
            if not 0.25 <= ratio <= 4:
                raise SpacingError(f"radial spacing needs R*eps within a factor 4 of X: R*eps/X={ratio:.6g}")
            if not X / self.R > self.eps:
                raise SpacingError(f"radial gaps X/R={X / self.R:.6g} must exceed eps={self.eps:.6g}")
        elif self.constraint_kind == "spatial":
            if not self.R > X:
                raise SpacingError(f"spatial spacing needs R > X: R={self.R}, X={X}")
            if not self.R * self.eps ** 3 >= SPATIAL_PACKING * (1 - 1e-12):
                raise SpacingError(
                    f"spatial spacing needs R*eps^3 >= {SPATIAL_PACKING}: got {self.R * self.eps ** 3:.6g}")
        else:
            raise SpacingError(f"unknown constraint kind {self.constraint_kind!r}")

    @classmethod
    def radial_default(cls, X: float) -> SpacingSpec:
        R = math.ceil(X ** (2 / 3)) + 1
        return cls(R, X / (2 * R), "radial")

    @classmethod
    def spatial_default(cls, X: float) -> SpacingSpec:
        R = math.floor(X) + 1
        return cls(R, (SPATIAL_PACKING / R) ** (1 / 3), "spatial")


def _mean_sq(records: Sequence[ExperimentRecord]) -> float:
    return float(np.mean([r.err_sq for r in records]))


def radial_mean_square(p: Point, X: float, spec: SpacingSpec, cfg: GroupConfig | None = None,
                       threads: int = 1) -> tuple[float, list[ExperimentRecord]]:
    """(1/R) sum |e(p, X_k)|^2 with X_k = X + (k - 1/2) X/R, k = 1..R."""
    if X < 2:
        raise ValueError("radial average needs X >= 2")
    if spec.constraint_kind != "radial":
        raise SpacingError("radial_mean_square needs a radial SpacingSpec")
    spec.validate(X)
    Xs = [X + (k - 0.5) * X / spec.R for k in range(1, spec.R + 1)]
    results = count_sweep(p, Xs, cfg, threads=threads)
    records = [ExperimentRecord("radial", X, k, Xk, r.err) for k, (Xk, r) in enumerate(zip(Xs, results), 1)]
    return _mean_sq(records), records


@lru_cache(maxsize=4)
def _search_set(search_norm: int) -> np.ndarray:
    return _small_matrices(search_norm)


def _orbit(q: Point, search_norm: int) -> np.ndarray:
    x1, x2, y = _act_arrays(_search_set(search_norm), q)
    return np.stack([x1, x2, y], axis=1)


def _min_delta(p: Point, orbit: np.ndarray) -> float:
    dz2 = (orbit[:, 0] - p.x1) ** 2 + (orbit[:, 1] - p.x2) ** 2
    delta = (dz2 + orbit[:, 2] ** 2 + p.y * p.y) / (2 * p.y * orbit[:, 2])
    return float(np.min(delta))


def induced_distance(p: Point, q: Point, search_norm: int = 2) -> float:
    """min arccosh delta(p, gamma q) over gamma with entry norms <= search_norm."""
    if search_norm < 2:
        raise ValueError("search_norm must be >= 2")
    return math.acosh(max(1.0, _min_delta(p, _orbit(q, search_norm))))


def sample_separated_points(R: int, eps: float, region=DEFAULT_REGION, seed: int | None = None,
                            search_norm: int = 2) -> list[Point]:
    """Rejection-sample R points of the box with pairwise induced distance > eps."""
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    (a1, b1), (a2, b2), (ay, by) = region
    threshold = math.cosh(eps)
    pts: list[Point] = []
    orbits = np.empty((0, 3))
    size = len(_search_set(search_norm))
    rejections = 0
    while len(pts) < R:
        q = Point(rng.uniform(a1, b1), rng.uniform(a2, b2), rng.uniform(ay, by))
        if len(pts):
            dz2 = (orbits[:, 0] - q.x1) ** 2 + (orbits[:, 1] - q.x2) ** 2
            delta = (dz2 + orbits[:, 2] ** 2 + q.y * q.y) / (2 * q.y * orbits[:, 2])
            if np.min(delta) <= threshold:
                rejections += 1
                if rejections > MAX_REJECTIONS:
                    raise SpacingError(f"packing infeasible: placed {len(pts)} of {R} points at eps={eps:.6g}")
                continue
        pts.append(q)
        orbits = np.concatenate([orbits, _orbit(q, search_norm)])
        assert len(orbits) == size * len(pts)
    return pts


def spatial_mean_square(X: float, spec: SpacingSpec, region=DEFAULT_REGION, cfg: GroupConfig | None = None,
                        seed: int | None = None, threads: int = 1,
                        points: Sequence[Point] | None = None) -> tuple[float, list[ExperimentRecord]]:
    """(1/R) sum |e(X, p_k)|^2 over separated base points p_k."""
    if spec.constraint_kind != "spatial":
        raise SpacingError("spatial_mean_square needs a spatial SpacingSpec")
    spec.validate(X)
    if points is None:
        points = sample_separated_points(spec.R, spec.eps, region, seed)
    records = []
    for k, pk in enumerate(points, 1):
        r = count_sector(pk, X, cfg, threads=threads)
        records.append(ExperimentRecord("spatial", X, k, encode_point(pk), r.err))
    return _mean_sq(records), records


def encode_point(p: Point) -> float:
    """A single float standing for a sample point in the CSV: x1 + 10 x2 + 100 y rounded to 1e-4 cells."""
    return round(p.x1, 4) + 10 * round(p.x2, 4) + 100 * round(p.y, 4)


@dataclass
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    dropped: int


def fit_exponent(records: Iterable[tuple[float, float]]) -> ExponentFit:
    """Least-squares slope of log(value) against log(X); non-positive values are dropped."""
    pairs = [(float(x), float(v)) for x, v in records]
    usable = [(x, v) for x, v in pairs if v > 0 and x > 0]
    if len({x for x, _ in usable}) < 3:
        raise ValueError(f"need >= 3 distinct X with positive values, got {len(usable)} usable points")
    lx = np.log([x for x, _ in usable])
    lv = np.log([v for _, v in usable])
    res = stats.linregress(lx, lv)
    stderr = float(res.stderr) if len(usable) > 2 else float("nan")
    return ExponentFit(float(res.slope), stderr, float(res.intercept), len(pairs) - len(usable))


def geometric_grid(lo: float, hi: float, n: int) -> list[float]:
    return [float(v) for v in np.geomspace(lo, hi, n)]

