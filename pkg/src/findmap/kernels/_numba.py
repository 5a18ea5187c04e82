"""numba-compiled kernels. Loop-level twins of ``_numpy``."""
import math

import numpy as np
from numba import njit

RSS, STOF, DAT = 0, 1, 2
NONE, POWER, SHIFT = 0, 1, 2


@njit(cache=True)
def accusation_matrix(true_xy, claimed_xy, technique, kind, value,
                      s_common, wavelength, s_r, s_u, eps):
    n = true_xy.shape[0]
    out = np.zeros((n, n), dtype=np.bool_)
    k = wavelength / (4.0 * math.pi)
    for i in range(n):
        xi, yi = true_xy[i, 0], true_xy[i, 1]
        for j in range(n):
            if i == j:
                continue
            d = math.hypot(xi - true_xy[j, 0], yi - true_xy[j, 1])
            d_claim = math.hypot(xi - claimed_xy[j, 0], yi - claimed_xy[j, 1])
            if technique == RSS:
                s_tx = value[j] if kind[j] == POWER else s_common
                s_rx = s_tx * (wavelength / (4.0 * math.pi * d)) ** 2
                dhat = k * math.sqrt(s_common / s_rx)
            elif technique == STOF:
                t_stamp = -value[j] / s_r if kind[j] == SHIFT else 0.0
                t_recv = d / s_r
                if t_recv < t_stamp:
                    out[i, j] = True
                    continue
                dhat = s_r * (t_recv - t_stamp)
            else:
                t_gap = d / s_u - d / s_r
                if kind[j] == SHIFT:
                    t_gap += value[j] * (1.0 / s_u - 1.0 / s_r)
                if t_gap < 0:
                    out[i, j] = True
                    continue
                dhat = t_gap * s_r * s_u / (s_r - s_u)
            out[i, j] = abs(dhat - d_claim) > eps
    return out


@njit(cache=True)
def min_triangle_area_with(xy, p):
    k = xy.shape[0]
    best = np.inf
    for i in range(k):
        ax, ay = xy[i, 0] - p[0], xy[i, 1] - p[1]
        for j in range(i + 1, k):
            bx, by = xy[j, 0] - p[0], xy[j, 1] - p[1]
            area = 0.5 * abs(ax * by - ay * bx)
            if area < best:
                best = area
    return best


@njit(cache=True)
def min_circle_residual_with(xy, triples, p):
    best = np.inf
    for t in range(triples.shape[0]):
        ax, ay = xy[triples[t, 0], 0], xy[triples[t, 0], 1]
        bx, by = xy[triples[t, 1], 0] - ax, xy[triples[t, 1], 1] - ay
        cx, cy = xy[triples[t, 2], 0] - ax, xy[triples[t, 2], 1] - ay
        det = 2.0 * (bx * cy - by * cx)
        b2 = bx * bx + by * by
        c2 = cx * cx + cy * cy
        ux = (cy * b2 - by * c2) / det
        uy = (bx * c2 - cx * b2) / det
        r = math.hypot(ux, uy)
        res = abs(math.hypot(p[0] - ax - ux, p[1] - ay - uy) - r)
        if res < best:
            best = res
    return best


@njit(cache=True)
def _det(m):
    # Gaussian elimination with partial pivoting, destroys m
    n = m.shape[0]
    det = 1.0
    for c in range(n):
        piv = c
        big = abs(m[c, c])
        for r in range(c + 1, n):
            if abs(m[r, c]) > big:
                big = abs(m[r, c])
                piv = r
        if big == 0.0:
            return 0.0
        if piv != c:
            for k in range(n):
                tmp = m[c, k]
                m[c, k] = m[piv, k]
                m[piv, k] = tmp
            det = -det
        det *= m[c, c]
        for r in range(c + 1, n):
            f = m[r, c] / m[c, c]
            for k in range(c, n):
                m[r, k] -= f * m[c, k]
    return det


@njit(cache=True)
def _conic_det(pts):
    mx = 0.0
    my = 0.0
    for i in range(6):
        mx += pts[i, 0]
        my += pts[i, 1]
    mx /= 6.0
    my /= 6.0
    s = 0.0
    for i in range(6):
        s = max(s, abs(pts[i, 0] - mx), abs(pts[i, 1] - my))
    if s == 0.0:
        s = 1.0
    m = np.empty((6, 6))
    for i in range(6):
        x = (pts[i, 0] - mx) / s
        y = (pts[i, 1] - my) / s
        m[i, 0] = x * x
        m[i, 1] = x * y
        m[i, 2] = y * y
        m[i, 3] = x
        m[i, 4] = y
        m[i, 5] = 1.0
        big = 0.0
        for k in range(6):
            big = max(big, abs(m[i, k]))
        for k in range(6):
            m[i, k] /= big
    return _det(m)


@njit(cache=True)
def conic_dets(pts):
    out = np.empty(pts.shape[0])
    for t in range(pts.shape[0]):
        out[t] = _conic_det(pts[t])
    return out


@njit(cache=True)
def min_conic_det_with(xy, quintuples, p):
    best = np.inf
    pts = np.empty((6, 2))
    for t in range(quintuples.shape[0]):
        for i in range(5):
            pts[i, 0] = xy[quintuples[t, i], 0]
            pts[i, 1] = xy[quintuples[t, i], 1]
        pts[5, 0] = p[0]
        pts[5, 1] = p[1]
        v = abs(_conic_det(pts))
        if v < best:
            best = v
    return best


@njit(cache=True)
def grid_scan(stations, pinv, candidates, params, mode, eps):
    k = stations.shape[0]
    sq = np.empty(k)
    for i in range(k):
        sq[i] = stations[i, 0] ** 2 + stations[i, 1] ** 2
    d_claim = np.empty(k)
    rhs = np.empty(k - 1)
    blind = 0
    worst = np.inf
    for qi in range(params.shape[0]):
        q = params[qi]
        for c in range(candidates.shape[0]):
            cx, cy = candidates[c, 0], candidates[c, 1]
            for i in range(k):
                d_claim[i] = math.hypot(cx - stations[i, 0], cy - stations[i, 1])
            r0 = d_claim[0] / q if mode == 0 else d_claim[0] - q
            for i in range(1, k):
                ri = d_claim[i] / q if mode == 0 else d_claim[i] - q
                rhs[i - 1] = 0.5 * ((r0 * r0 - ri * ri) + (sq[i] - sq[0]))
            fx = 0.0
            fy = 0.0
            for i in range(k - 1):
                fx += pinv[0, i] * rhs[i]
                fy += pinv[1, i] * rhs[i]
            per = 0.0
            for i in range(k):
                dt = math.hypot(fx - stations[i, 0], fy - stations[i, 1])
                dhat = dt * q if mode == 0 else dt + q
                if mode == 1 and dhat < 0:
                    per = np.inf
                    break
                per = max(per, abs(dhat - d_claim[i]))
            if per <= eps:
                blind += 1
            if per < worst:
                worst = per
    return blind, worst
