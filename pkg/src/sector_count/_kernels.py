"""Compiled enumeration kernels for orbit points of PSL_2(Z[i]).

Gaussian integers are passed around as (re, im) pairs of int64.  The
kernels release the GIL so callers may run chunks of the c-range on a
thread pool; each chunk returns its own arrays and callers merge them
in chunk order.
"""

import math

import numpy as np
from numba import njit

ENTRY_LIMIT = 1 << 31


@njit(cache=True, nogil=True)
def _round_half_down(num, den):
    return -((den - 2 * num) // (2 * den))


@njit(cache=True, nogil=True)
def _gmul(a1, a2, b1, b2):
    return a1 * b1 - a2 * b2, a1 * b2 + a2 * b1


@njit(cache=True, nogil=True)
def gauss_xgcd(a1, a2, b1, b2):
    """(g, x, y) with a*x + b*y = g, g normalized to re > 0, im >= 0."""
    r0r, r0i, r1r, r1i = a1, a2, b1, b2
    x0r, x0i, x1r, x1i = 1, 0, 0, 0
    y0r, y0i, y1r, y1i = 0, 0, 1, 0
    while r1r != 0 or r1i != 0:
        n = r1r * r1r + r1i * r1i
        pr, pi = _gmul(r0r, r0i, r1r, -r1i)
        qr = _round_half_down(pr, n)
        qi = _round_half_down(pi, n)
        tr, ti = _gmul(qr, qi, r1r, r1i)
        r0r, r0i, r1r, r1i = r1r, r1i, r0r - tr, r0i - ti
        tr, ti = _gmul(qr, qi, x1r, x1i)
        x0r, x0i, x1r, x1i = x1r, x1i, x0r - tr, x0i - ti
        tr, ti = _gmul(qr, qi, y1r, y1i)
        y0r, y0i, y1r, y1i = y1r, y1i, y0r - tr, y0i - ti
    # rotate by the unit u making the gcd first-quadrant
    ur, ui = 1, 0
    for k in range(4):
        gr, gi = _gmul(r0r, r0i, ur, ui)
        if gr > 0 and gi >= 0:
            break
        ur, ui = -ui, ur
    gr, gi = _gmul(r0r, r0i, ur, ui)
    xr, xi = _gmul(x0r, x0i, ur, ui)
    yr, yi = _gmul(y0r, y0i, ur, ui)
    return gr, gi, xr, xi, yr, yi


@njit(cache=True, nogil=True)
def _grow(buf, n):
    if n < buf.shape[0]:
        return buf
    new = np.empty((2 * buf.shape[0],) + buf.shape[1:], buf.dtype)
    new[:n] = buf[:n]
    return new


@njit(cache=True, nogil=True)
def _act(ar, ai, br, bi, cr, ci, dr, di, x1, x2, y):
    """Mobius action of (a b; c d) on (x1, x2, y)."""
    czr = cr * x1 - ci * x2 + dr
    czi = cr * x2 + ci * x1 + di
    c2 = cr * cr + ci * ci
    den = czr * czr + czi * czi + c2 * y * y
    azr = ar * x1 - ai * x2 + br
    azi = ar * x2 + ai * x1 + bi
    # (az+b) * conj(cz+d) + a * conj(c) * y^2
    nr = azr * czr + azi * czi + (ar * cr + ai * ci) * y * y
    ni = azi * czr - azr * czi + (ai * cr - ar * ci) * y * y
    return nr / den, ni / den, y / den, den


@njit(cache=True, nogil=True)
def reduce_plane_point(x, t):
    """Same reduction as reduction.reduce_plane_raw, on floats."""
    a, b, c, d = 1, 0, 0, 1
    inversions = 0
    done = False
    for _ in range(100000):
        k = math.ceil(x - 0.5)
        if k != 0:
            x -= k
            a, b = a - k * c, b - k * d
        r2 = x * x + t * t
        if r2 >= 1.0:
            done = True
            break
        x, t = -x / r2, t / r2
        a, b, c, d = -c, -d, a, b
        inversions += 1
    if not done:
        inversions = -1
    if x < 0:
        x = -x
        a, b = -a, -b
    return x, t, a, b, c, d, inversions


@njit(cache=True, nogil=True)
def sector_chunk(c_list, x1, x2, y, X, bound, reduced_only, all_units, max_candidates):
    """Orbit points gamma*p with sec v <= X, one row per (c, d, n2) hit.

    Returns (mats, plane, secs, scanned, status): mats holds the raw
    representative (a, b, c, d) as 8 int64, plane the PGL_2(Z) reduction
    matrix (4 ints, det +-1) of its projection, secs the value sec v.
    status is 0 on success, 1 on candidate-budget overflow, 2 on entry
    overflow, 3 on a non-terminating reduction.
    """
    U = math.sqrt(max(X * X - 1.0, 0.0))
    cap = 1024
    mats = np.empty((cap, 8), np.int64)
    plane = np.empty((cap, 4), np.int64)
    secs = np.empty(cap, np.float64)
    n = 0
    scanned = 0
    for idx in range(c_list.shape[0]):
        cr = c_list[idx, 0]
        ci = c_list[idx, 1]
        c2 = cr * cr + ci * ci
        rem = bound - c2 * y * y
        if rem < 0:
            continue
        # centre of the d-disc is -(c z)
        ctr_r = -(cr * x1 - ci * x2)
        ctr_i = -(cr * x2 + ci * x1)
        rad = math.sqrt(rem)
        for dr in range(int(math.ceil(ctr_r - rad)), int(math.floor(ctr_r + rad)) + 1):
            span2 = rem - (dr - ctr_r) ** 2
            if span2 < 0:
                continue
            sp = math.sqrt(span2)
            for di in range(int(math.ceil(ctr_i - sp)), int(math.floor(ctr_i + sp)) + 1):
                if c2 == 0:
                    if dr * dr + di * di != 1:
                        continue
                    if not all_units and not (dr == 1 and di == 0):
                        continue
                    if all_units and not ((dr == 1 and di == 0) or (dr == 0 and di == 1)):
                        continue
                scanned += 1
                if scanned > max_candidates:
                    return mats[:n], plane[:n], secs[:n], scanned, 1
                gr, gi, xr, xi, yr, yi = gauss_xgcd(cr, ci, dr, di)
                if gr != 1 or gi != 0:
                    continue
                # c*x + d*y = 1  =>  (y, -x; c, d) is unimodular
                ar, ai, br, bi = yr, yi, -xr, -xi
                wx, wx2, wy, den = _act(ar, ai, br, bi, cr, ci, dr, di, x1, x2, y)
                half = wy * U
                lo = int(math.ceil(-half - wx2))
                hi = int(math.floor(half - wx2))
                for n2 in range(lo, hi + 1):
                    px2 = wx2 + n2
                    sec = math.sqrt(px2 * px2 + wy * wy) / wy
                    if sec > X:
                        continue
                    t = math.sqrt(px2 * px2 + wy * wy)
                    xr_, tr_, ma, mb, mc, md, inv = reduce_plane_point(wx, t)
                    if inv < 0:
                        return mats[:n], plane[:n], secs[:n], scanned, 3
                    if reduced_only and inv > 0:
                        continue
                    # top row shifted by i*n2: (a + i n2 c, b + i n2 d)
                    tr1, ti1 = _gmul(0, n2, cr, ci)
                    tr2, ti2 = _gmul(0, n2, dr, di)
                    mats = _grow(mats, n)
                    plane = _grow(plane, n)
                    secs = _grow(secs, n)
                    row = mats[n]
                    row[0] = ar + tr1
                    row[1] = ai + ti1
                    row[2] = br + tr2
                    row[3] = bi + ti2
                    row[4] = cr
                    row[5] = ci
                    row[6] = dr
                    row[7] = di
                    for k in range(8):
                        if abs(row[k]) >= ENTRY_LIMIT:
                            return mats[:n], plane[:n], secs[:n], scanned, 2
                    plane[n, 0] = ma
                    plane[n, 1] = mb
                    plane[n, 2] = mc
                    plane[n, 3] = md
                    secs[n] = sec
                    n += 1
    return mats[:n], plane[:n], secs[:n], scanned, 0


@njit(cache=True, nogil=True)
def ball_chunk(c_list, px1, px2, py, qx1, qx2, qy, x, bound, max_candidates):
    """Group elements gamma (mod +-I) with delta(p, gamma q) <= x.

    c ranges over c_list, which must contain one of each +- pair; for
    c = 0 the rows (0, 1) and (0, i) are used.  Every element is emitted
    exactly once as 8 int64 entries.
    """
    cap = 1024
    mats = np.empty((cap, 8), np.int64)
    n = 0
    scanned = 0
    for idx in range(c_list.shape[0]):
        cr = c_list[idx, 0]
        ci = c_list[idx, 1]
        c2 = cr * cr + ci * ci
        rem = bound - c2 * qy * qy
        if rem < 0:
            continue
        ctr_r = -(cr * qx1 - ci * qx2)
        ctr_i = -(cr * qx2 + ci * qx1)
        rad = math.sqrt(rem)
        for dr in range(int(math.ceil(ctr_r - rad)), int(math.floor(ctr_r + rad)) + 1):
            span2 = rem - (dr - ctr_r) ** 2
            if span2 < 0:
                continue
            sp = math.sqrt(span2)
            for di in range(int(math.ceil(ctr_i - sp)), int(math.floor(ctr_i + sp)) + 1):
                if c2 == 0 and not ((dr == 1 and di == 0) or (dr == 0 and di == 1)):
                    continue
                scanned += 1
                if scanned > max_candidates:
                    return mats[:n], scanned, 1
                gr, gi, xr, xi, yr, yi = gauss_xgcd(cr, ci, dr, di)
                if gr != 1 or gi != 0:
                    continue
                ar, ai, br, bi = yr, yi, -xr, -xi
                wx, wx2, wy, den = _act(ar, ai, br, bi, cr, ci, dr, di, qx1, qx2, qy)
                # delta <= x  <=>  |z_p - w - n|^2 <= 2 x py wy - py^2 - wy^2
                rho2 = 2.0 * x * py * wy - py * py - wy * wy
                if rho2 < 0:
                    continue
                rho = math.sqrt(rho2)
                o1 = px1 - wx
                o2 = px2 - wx2
                for n1 in range(int(math.ceil(o1 - rho)), int(math.floor(o1 + rho)) + 1):
                    s2 = rho2 - (o1 - n1) ** 2
                    if s2 < 0:
                        continue
                    s = math.sqrt(s2)
                    for n2 in range(int(math.ceil(o2 - s)), int(math.floor(o2 + s)) + 1):
                        dz2 = (o1 - n1) ** 2 + (o2 - n2) ** 2
                        delta = (dz2 + py * py + wy * wy) / (2.0 * py * wy)
                        if delta > x:
                            continue
                        tr1, ti1 = _gmul(n1, n2, cr, ci)
                        tr2, ti2 = _gmul(n1, n2, dr, di)
                        mats = _grow(mats, n)
                        row = mats[n]
                        row[0] = ar + tr1
                        row[1] = ai + ti1
                        row[2] = br + tr2
                        row[3] = bi + ti2
                        row[4] = cr
                        row[5] = ci
                        row[6] = dr
                        row[7] = di
                        n += 1
    return mats[:n], scanned, 0
