"""Pure-numpy kernels. Same signatures and semantics as ``_numba``."""
import numpy as np

# technique codes
RSS, STOF, DAT = 0, 1, 2
# corruption codes
NONE, POWER, SHIFT = 0, 1, 2


def accusation_matrix(true_xy, claimed_xy, technique, kind, value,
                      s_common, wavelength, s_r, s_u, eps):
    """accuse[i, j]: receiver i (at its true position) rejects sender j's claim."""
    n = true_xy.shape[0]
    diff = true_xy[:, None, :] - true_xy[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    cdiff = true_xy[:, None, :] - claimed_xy[None, :, :]
    d_claim = np.hypot(cdiff[..., 0], cdiff[..., 1])
    off = ~np.eye(n, dtype=bool)
    dsafe = np.where(off, d, 1.0)
    neg = np.zeros((n, n), dtype=bool)
    if technique == RSS:
        s_tx = np.where(kind == POWER, value, s_common)[None, :]
        s_rx = s_tx * (wavelength / (4.0 * np.pi * dsafe)) ** 2
        dhat = wavelength / (4.0 * np.pi) * np.sqrt(s_common / s_rx)
    elif technique == STOF:
        t_stamp = np.where(kind == SHIFT, -value / s_r, 0.0)[None, :]
        t_recv = dsafe / s_r
        neg = t_recv < t_stamp
        dhat = s_r * (t_recv - t_stamp)
    else:
        t_gap = dsafe / s_u - dsafe / s_r
        t_gap = t_gap + np.where(kind == SHIFT, value * (1.0 / s_u - 1.0 / s_r), 0.0)[None, :]
        neg = t_gap < 0
        dhat = t_gap * s_r * s_u / (s_r - s_u)
    accuse = neg | (np.abs(dhat - d_claim) > eps)
    return accuse & off


def min_triangle_area_with(xy, p):
    k = xy.shape[0]
    if k < 2:
        return np.inf
    i, j = np.triu_indices(k, 1)
    a, b = xy[i] - p, xy[j] - p
    return float(np.min(np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]))) * 0.5


def min_circle_residual_with(xy, triples, p):
    if triples.shape[0] == 0:
        return np.inf
    a = xy[triples[:, 0]]
    b = xy[triples[:, 1]] - a
    c = xy[triples[:, 2]] - a
    det = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    b2 = (b * b).sum(axis=1)
    c2 = (c * c).sum(axis=1)
    ux = (c[:, 1] * b2 - b[:, 1] * c2) / det
    uy = (b[:, 0] * c2 - c[:, 0] * b2) / det
    r = np.hypot(ux, uy)
    dp = np.hypot(p[0] - (a[:, 0] + ux), p[1] - (a[:, 1] + uy))
    return float(np.min(np.abs(dp - r)))


def conic_dets(pts):
    """Normalized conic determinants for a stack of six-point sets, shape (m, 6, 2)."""
    centred = pts - pts.mean(axis=1, keepdims=True)
    s = np.max(np.abs(centred), axis=(1, 2), keepdims=True)
    s = np.where(s > 0, s, 1.0)
    q = centred / s
    x, y = q[..., 0], q[..., 1]
    m = np.stack([x * x, x * y, y * y, x, y, np.ones_like(x)], axis=-1)
    m = m / np.max(np.abs(m), axis=2, keepdims=True)
    return np.linalg.det(m)


def min_conic_det_with(xy, quintuples, p):
    if quintuples.shape[0] == 0:
        return np.inf
    pts = np.concatenate([xy[quintuples], np.broadcast_to(p, (quintuples.shape[0], 1, 2))], axis=1)
    return float(np.min(np.abs(conic_dets(pts))))


def grid_scan(stations, pinv, candidates, params, mode, eps):
    """Bounded search for an attack no station notices.

    For each candidate fake position and bias parameter the attacker's true
    position is the least-squares point matching the ranges the stations
    must measure. Returns (blind_count, worst_margin) where worst_margin is
    the smallest, over candidates, of the largest station inconsistency.
    """
    sq =(stations ** 2).sum(axis=1)
    blind = 0
    worst = np.inf
    for q in params:
        diff = candidates[:, None, :] - stations[None, :, :]
        d_claim = np.hypot(diff[..., 0], diff[..., 1])
        if mode == 0:
            rho = d_claim / q
        else:
            rho = d_claim - q
        rhs = 0.5 * ((rho[:, :1] ** 2 - rho[:, 1:] ** 2) + (sq[None, 1:] - sq[0]))
        f = rhs @ pinv.T
        fd = f[:, None, :] - stations[None, :, :]
        d_true = np.hypot(fd[..., 0], fd[..., 1])
        dhat = d_true * q if mode == 0 else d_true + q
        incons = np.abs(dhat - d_claim)
        if mode == 1:
            incons = np.where(dhat < 0, np.inf, incons)
        per = incons.max(axis=1)
        blind += int(np.count_nonzero(per <= eps))
        worst = min(worst, float(per.min()))
    return blind, worst
