"""Counting orbit points of PSL_2(Z[i]) in sectors around the plane x2 = 0.

N(p, X) counts cosets H*gamma with sec v(gamma p) <= X.  Every coset
has a representative whose orbit point projects into the reduced domain
S of the plane, which forces |c p + d|^2 <= 2 X y(p) / sqrt(3); the
enumeration walks coprime rows (c, d) inside that bound.

Two enumeration modes exist.  ``reduced`` takes c up to units and keeps
only hits whose projection needs no inversion to reach S, which gives
one hit per coset for generic p.  ``full`` takes c up to sign, keeps
every hit and deduplicates them; it is slower and serves as a cross-check.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .gaussian import GaussInt, GMatrix, same_coset
from .geometry import Point
from .reduction import KEY_GRID

CATALAN = 0.915965594177219015054603514932384110774
BOUND_SAFETY = 1.05
DEFAULT_MAX_CANDIDATES = 200_000_000
AUDIT_FRACTION = 0.01


class DedupError(RuntimeError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class GroupConfig:
    covolume: float
    area_HP: float
    exceptional: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not (self.covolume > 0 and self.area_HP > 0):
            raise ValueError("covolume and area_HP must be positive")
        for s, _ in self.exceptional:
            if not 1 < s < 2:
                raise ValueError(f"exceptional exponent {s} not in (1, 2)")

    @property
    def ratio(self) -> float:
        return self.area_HP / self.covolume

    def main_term(self, X: float) -> float:
        extra = sum(coeff * 2 ** (s - 1) / s * X ** s for s, coeff in self.exceptional)
        return self.ratio * X * X + extra


def picard_config() -> GroupConfig:
    """PSL_2(Z[i]) with H = PSL_2(Z) u iota PSL_2(Z): vol(H\\P) = pi/6, covolume = G/3."""
    return GroupConfig(covolume=CATALAN / 3, area_HP=math.pi / 6)


@dataclass
class CountResult:
    n: int
    main: float
    err: float
    candidates_scanned: int
    cosets_kept: int
    bound_B: float


@dataclass
class SectorOrbit:
    """Sorted sec v values of one orbit point per coset, up to ``X``.

    Counts at any X' <= X follow by bisection, so sweeps reuse one
    enumeration.
    """

    p: Point
    X: float
    secs: np.ndarray
    reps: np.ndarray = field(repr=False)
    candidates_scanned: int
    bound_B: float
    hits: int
    mode: str = "reduced"
    key_collisions: int = 0

    def count(self, X: float) -> int:
        if X > self.X:
            raise ValueError(f"orbit enumerated only up to X={self.X}")
        return int(np.searchsorted(self.secs, X, side="right"))

    def weighted_sum(self, profile) -> float:
        w = np.arccosh(np.maximum(self.secs, 1.0))
        return float(np.sum(profile(w)))


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=64)
def _c_list(max_norm: int, half_plane: bool) -> np.ndarray:
    """Gaussian integers c with N(c) <= max_norm, one per unit class (or per sign), zero first."""
    r = int(math.isqrt(max_norm))
    re, im = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    re, im = re.ravel(), im.ravel()
    norm = re * re + im * im
    if half_plane:
        keep = (re > 0) | ((re == 0) & (im > 0))
    else:
        keep = (re > 0) & (im >= 0)
    keep &= norm <= max_norm
    order = np.lexsort((im[keep], re[keep], norm[keep]))
    cs = np.stack([re[keep][order], im[keep][order]], axis=1)
    return np.concatenate([np.zeros((1, 2), np.int64), cs.astype(np.int64)])


def _run_chunks(kernel, c_list: np.ndarray, args: tuple, threads: int, n_out: int):
    chunks = np.array_split(c_list, max(1, threads * 4)) if threads > 1 else [c_list]
    chunks = [c for c in chunks if len(c)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            outs = list(pool.map(lambda c: kernel(c, *args), chunks))
    else:
        outs = [kernel(c, *args) for c in chunks]
    return outs


def _gmul_arrays(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise product of (n, 8) integer arrays holding (a, b, c, d) as re/im pairs."""
    def cm(x, y):
        return x[:, 0] * y[:, 0] - x[:, 1] * y[:, 1], x[:, 0] * y[:, 1] + x[:, 1] * y[:, 0]

    a, b, c, d = (A[:, 2 * k:2 * k + 2] for k in range(4))
    e, f, g, h = (B[:, 2 * k:2 * k + 2] for k in range(4))
    out = np.empty_like(A)
    pairs = (((a, e), (b, g)), ((a, f), (b, h)), ((c, e), (d, g)), ((c, f), (d, h)))
    for slot, (p1, p2) in enumerate(pairs):
        r1, i1 = cm(*p1)
        r2, i2 = cm(*p2)
        out[:, 2 * slot] = r1 + r2
        out[:, 2 * slot + 1] = i1 + i2
    return out


def _plane_elements(plane: np.ndarray) -> np.ndarray:
    """(n, 4) PGL_2(Z) matrices to (n, 8) Gaussian matrices of H."""
    det = plane[:, 0] * plane[:, 3] - plane[:, 1] * plane[:, 2]
    if np.any(np.abs(det) != 1):
        raise DedupError("reduction matrix not in PGL_2(Z)")
    out = np.zeros((len(plane), 8), np.int64)
    real = det == 1
    for k in range(4):
        out[real, 2 * k] = plane[real, k]
        out[~real, 2 * k + 1] = plane[~real, k]
    return out


def _sign_canonical(M: np.ndarray) -> np.ndarray:
    """Pick M or -M so that the first nonzero entry is negative (lexicographic min)."""
    nz = M != 0
    first = np.argmax(nz, axis=1)
    lead = M[np.arange(len(M)), first]
    return np.where((lead > 0)[:, None], -M, M)


def _act_arrays(M: np.ndarray, p: Point) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = M[:, 0] + 1j * M[:, 1]
    b = M[:, 2] + 1j * M[:, 3]
    c = M[:, 4] + 1j * M[:, 5]
    d = M[:, 6] + 1j * M[:, 7]
    z = complex(p.x1, p.x2)
    y2 = p.y * p.y
    czd = c * z + d
    den = np.abs(czd) ** 2 + np.abs(c) ** 2 * y2
    w = ((a * z + b) * np.conj(czd) + a * np.conj(c) * y2) / den
    return w.real, w.imag, p.y / den


def _to_gmatrix(row) -> GMatrix:
    r = [int(v) for v in row]
    return GMatrix(*(GaussInt(r[2 * k], r[2 * k + 1]) for k in range(4)))


def _keys(canon: np.ndarray, p: Point) -> np.ndarray:
    x1, x2, y = _act_arrays(canon, p)
    u = 0.5 * np.log(x2 * x2 + y * y)
    v = np.abs(np.arctan(x2 / y))
    return np.rint(np.stack([x1, u, v], axis=1) / KEY_GRID).astype(np.int64)


def _audit_seed(p: Point, X: float) -> int:
    return hash((p.x1, p.x2, p.y, X)) & 0xFFFFFFFF


def sector_orbit(p: Point, X: float, *, mode: str = "reduced", threads: int = 1,
                 max_candidates: int = DEFAULT_MAX_CANDIDATES, audit: bool = True) -> SectorOrbit:
    """Enumerate one orbit point per coset with sec v <= X and return their sorted sec values."""
    if not X >= 1:
        raise ValueError(f"X must be >= 1, got {X}")
    if mode not in ("reduced", "full"):
        raise ValueError("mode must be 'reduced' or 'full'")
    raw_bound = 2 * X * p.y / math.sqrt(3)
    bound = BOUND_SAFETY * raw_bound
    c_list = _c_list(int(math.floor(bound / (p.y * p.y))), mode == "full")
    budget = max_candidates // max(1, threads * 4) if threads > 1 else max_candidates
    outs = _run_chunks(_kernels.sector_chunk, c_list,
                       (p.x1, p.x2, p.y, float(X), bound, mode == "reduced", mode == "full", budget),
                       threads, 5)
    scanned = sum(o[3] for o in outs)
    for o in outs:
        if o[4] == 1:
            raise BudgetError(f"candidate budget {max_candidates} exceeded at bound B={raw_bound:.6g}")
        if o[4] == 2:
            raise OverflowError(f"matrix entries exceed 2^31 at bound B={raw_bound:.6g}")
        if o[4] == 3:
            raise RuntimeError("plane reduction did not terminate")
    raw = np.concatenate([o[0] for o in outs]) if outs else np.empty((0, 8), np.int64)
    plane = np.concatenate([o[1] for o in outs]) if outs else np.empty((0, 4), np.int64)
    secs = np.concatenate([o[2] for o in outs]) if outs else np.empty(0)
    hits = len(raw)
    if hits == 0:
        return SectorOrbit(p, X, secs, raw, scanned, raw_bound, 0, mode)

    canon = _sign_canonical(_gmul_arrays(_plane_elements(plane), raw))
    keys = _keys(canon, p)
    _, group = np.unique(keys, axis=0, return_inverse=True)
    leaders, collisions = _partition_cosets(canon, group.ravel())
    if collisions and mode == "reduced":
        # distinct cosets sharing a key means p is not generic; one hit per coset is no longer assured
        return sector_orbit(p, X, mode="full", threads=threads, max_candidates=max_candidates, audit=audit)
    if audit:
        rng = np.random.default_rng(_audit_seed(p, X))
        n_check = min(hits, max(20, int(AUDIT_FRACTION * hits)))
        for i in rng.choice(hits, n_check, replace=False):
            if not same_coset(_to_gmatrix(raw[i]), _to_gmatrix(canon[i])):
                raise DedupError("canonical representative left its coset")
        # every kept canonical representative must satisfy the un-inflated bound
        kept = canon[leaders]
        c = kept[:, 4] + 1j * kept[:, 5]
        d = kept[:, 6] + 1j * kept[:, 7]
        cp = np.abs(c * complex(p.x1, p.x2) + d) ** 2 + np.abs(c) ** 2 * p.y ** 2
        if np.any(cp > raw_bound * (1 + 1e-9)):
            raise DedupError(f"enumeration bound B={raw_bound:.6g} violated by a kept coset")
    order = np.argsort(secs[leaders], kind="stable")
    return SectorOrbit(p, X, secs[leaders][order], canon[leaders][order], scanned, raw_bound, hits,
                       mode, collisions)


def _partition_cosets(canon: np.ndarray, group: np.ndarray) -> tuple[np.ndarray, int]:
    """Split rows with equal keys into exact cosets.

    Returns one leader row index per coset and the number of key groups
    holding more than one coset.
    """
    n = len(canon)
    label = np.full(n, -1, np.int64)
    while True:
        todo = np.nonzero(label < 0)[0]
        if not len(todo):
            break
        lead = np.full(group.max() + 1, n, np.int64)
        np.minimum.at(lead, group[todo], todo)
        cand = lead[group[todo]]
        same = _in_H_rows(_gmul_arrays(canon[todo], _inverse_rows(canon[cand])))
        label[todo[same]] = cand[same]
    leaders = np.unique(label)
    per_group = np.bincount(group[leaders], minlength=group.max() + 1)
    return leaders, int(np.sum(per_group > 1))


def count_sector(p: Point, X: float, cfg: GroupConfig | None = None, **kw) -> CountResult:
    cfg = cfg or picard_config()
    orb = sector_orbit(p, X, **kw)
    n = orb.count(X)
    main = cfg.main_term(X)
    return CountResult(n, main, n - main, orb.candidates_scanned, n, orb.bound_B)


def count_sweep(p: Point, Xs, cfg: GroupConfig | None = None, **kw) -> list[CountResult]:
    """count_sector at every X in Xs from a single enumeration at max(Xs)."""
    cfg = cfg or picard_config()
    Xs = [float(X) for X in Xs]
    orb = sector_orbit(p, max(Xs), **kw)
    out = []
    for X in Xs:
        n = orb.count(X)
        main = cfg.main_term(X)
        out.append(CountResult(n, main, n - main, orb.candidates_scanned, n, orb.bound_B))
    return out


def automorphic_sum(p: Point, f, cfg: GroupConfig | None = None, **kw) -> float:
    """Sum of f(w(gamma p)) over cosets, w = arccosh sec v; f is an even profile with finite support."""
    support = float(f.support)
    if support <= 0:
        return 0.0
    X = math.cosh(support) * (1 + 1e-12)
    return sector_orbit(p, X, **kw).weighted_sum(f)


# ---------------------------------------------------------------------------
# brute-force oracle


@dataclass
class OracleResult:
    count: int
    previous: int
    depth: int

    @property
    def stable(self) -> bool:
        return self.count == self.previous


@lru_cache(maxsize=8)
def _small_matrices(depth: int) -> np.ndarray:
    """All (a, b, c, d) in Z[i] with entry norms <= depth and ad - bc = 1, one per +-pair."""
    r = int(math.isqrt(depth))
    g = [(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1) if a * a + b * b <= depth]
    G = np.array(g, np.int64)
    n = len(G)
    out = []
    for i in range(n):
        a = G[i]
        # ad - bc = 1 for all (b, c, d)
        bb, cc, dd = (np.repeat(G, n * n, axis=0),
                      np.tile(np.repeat(G, n, axis=0), (n, 1)),
                      np.tile(G, (n * n, 1)))
        ad_r = a[0] * dd[:, 0] - a[1] * dd[:, 1]
        ad_i = a[0] * dd[:, 1] + a[1] * dd[:, 0]
        bc_r = bb[:, 0] * cc[:, 0] - bb[:, 1] * cc[:, 1]
        bc_i = bb[:, 0] * cc[:, 1] + bb[:, 1] * cc[:, 0]
        ok = (ad_r - bc_r == 1) & (ad_i - bc_i == 0)
        if np.any(ok):
            m = np.concatenate([np.tile(a, (ok.sum(), 1)), bb[ok], cc[ok], dd[ok]], axis=1)
            out.append(m)
    M = np.concatenate(out)
    return np.unique(_sign_canonical(M), axis=0)


def _in_H_rows(M: np.ndarray) -> np.ndarray:
    return np.all(M[:, 1::2] == 0, axis=1) | np.all(M[:, 0::2] == 0, axis=1)


def _inverse_rows(M: np.ndarray) -> np.ndarray:
    inv = np.empty_like(M)
    inv[:, 0:2] = M[:, 6:8]
    inv[:, 2:4] = -M[:, 2:4]
    inv[:, 4:6] = -M[:, 4:6]
    inv[:, 6:8] = M[:, 0:2]
    return inv


def _oracle_raw(p: Point, X: float, depth: int) -> int:
    M = _small_matrices(depth)
    _, x2, y = _act_arrays(M, p)
    sec = np.sqrt(x2 * x2 + y * y) / y
    cand = M[sec <= X]
    reps = np.empty((0, 8), np.int64)
    for row in cand:
        if len(reps):
            prod = _gmul_arrays(np.tile(row, (len(reps), 1)), _inverse_rows(reps))
            if np.any(_in_H_rows(prod)):
                continue
        reps = np.vstack([reps, row])
    return len(reps)


def oracle_count(p: Point, X: float, depth: int) -> OracleResult:
    """Count cosets among all matrices with entry norms <= depth, by pairwise coset tests."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cur = _oracle_raw(p, X, depth)
    prev = _oracle_raw(p, X, depth - 1) if depth > 1 else -1
    return OracleResult(cur, prev, depth)


# ---------------------------------------------------------------------------
# ball counting


def ball_elements(p: Point, q: Point, x: float, *, threads: int = 1,
                  max_candidates: int = DEFAULT_MAX_CANDIDATES) -> np.ndarray:
    """All gamma (mod +-I) with delta(p, gamma q) <= x, as (n, 8) sign-canonical rows."""
    if not x >= 1:
        raise ValueError("x must be >= 1")
    # y(gamma q) = y_q/|cq+d|^2 and delta >= (y_p^2 + y^2)/(2 y_p y) force y >= y_p/(x + sqrt(x^2-1))
    bound = q.y * (x + math.sqrt(x * x - 1)) / p.y * (1 + 1e-9)
    c_list = _c_list(int(math.floor(bound / (q.y * q.y))), True)
    outs = _run_chunks(_kernels.ball_chunk, c_list,
                       (p.x1, p.x2, p.y, q.x1, q.x2, q.y, float(x), bound, max_candidates), threads, 3)
    if any(o[2] == 1 for o in outs):
        raise BudgetError(f"candidate budget {max_candidates} exceeded at bound {bound:.6g}")
    mats = np.concatenate([o[0] for o in outs])
    canon = _sign_canonical(mats)
    uniq = np.unique(canon, axis=0)
    if len(uniq) != len(canon):
        raise DedupError("ball enumeration produced a repeated element")
    return uniq


def ball_count(p: Point, q: Point, x: float, **kw) -> int:
    return len(ball_elements(p, q, x, **kw))


__all__ = [
    "CATALAN", "GroupConfig", "picard_config", "CountResult", "SectorOrbit", "DedupError", "BudgetError",
    "sector_orbit", "count_sector", "count_sweep", "automorphic_sum", "OracleResult", "oracle_count",
    "ball_elements", "ball_count",
]
