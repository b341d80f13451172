"""Tight O(N^2) geometry kernels, jitted with numba when available.

These run once per accepted flow step, so the pure-numpy fallbacks work but
cost noticeably more per step.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _self_cross_jit(p0x, p0y, p1x, p1y, closed):
    n = len(p0x)
    for i in range(n):
        jmax = n - 1 if (closed and i == 0) else n
        for j in range(i + 2, jmax):
            ex = p1x[i] - p0x[i]
            ey = p1y[i] - p0y[i]
            fx = p1x[j] - p0x[j]
            fy = p1y[j] - p0y[j]
            rx = p0x[j] - p0x[i]
            ry = p0y[j] - p0y[i]
            d1 = ex * ry - ey * rx
            d2 = ex * (ry + fy) - ey * (rx + fx)
            if d1 * d2 >= 0.0:
                continue
            d3 = fy * rx - fx * ry
            d4 = d3 + fx * ey - fy * ex
            if d3 * d4 < 0.0:
                return True
    return False


@njit(cache=True)
def _any_cross_jit(p0x, p0y, p1x, p1y, q0x, q0y, q1x, q1y):
    n = len(p0x)
    m = len(q0x)
    for i in range(n):
        ex = p1x[i] - p0x[i]
        ey = p1y[i] - p0y[i]
        for j in range(m):
            rx = q0x[j] - p0x[i]
            ry = q0y[j] - p0y[i]
            fx = q1x[j] - q0x[j]
            fy = q1y[j] - q0y[j]
            d1 = ex * ry - ey * rx
            d2 = ex * (ry + fy) - ey * (rx + fx)
            if d1 * d2 >= 0.0:
                continue
            d3 = fy * rx - fx * ry
            d4 = d3 + fx * ey - fy * ex
            if d3 * d4 < 0.0:
                return True
    return False


@njit(cache=True)
def _min_sq_point_seg_jit(px, py, ax, ay, bx, by):
    best = np.inf
    for j in range(len(ax)):
        abx = bx[j] - ax[j]
        aby = by[j] - ay[j]
        denom = abx * abx + aby * aby
        for i in range(len(px)):
            apx = px[i] - ax[j]
            apy = py[i] - ay[j]
            t = (apx * abx + apy * aby) / denom
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            dx = apx - t * abx
            dy = apy - t * aby
            d = dx * dx + dy * dy
            if d < best:
                best = d
    return best


@njit(cache=True)
def _all_points_in_polygon_jit(px, py, vx, vy):
    n = len(vx)
    for k in range(len(px)):
        x = px[k]
        y = py[k]
        inside = False
        j = n - 1
        for i in range(n):
            if (vy[i] > y) != (vy[j] > y):
                xi = vx[i] + (y - vy[i]) * (vx[j] - vx[i]) / (vy[j] - vy[i])
                if x < xi:
                    inside = not inside
            j = i
        if not inside:
            return False
    return True


def _split(points):
    return np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1])


def self_cross(starts: np.ndarray, ends: np.ndarray, closed: bool) -> bool:
    """Whether any two non-adjacent segments of one polyline properly cross."""
    if HAVE_NUMBA:
        sx, sy = _split(starts)
        ex, ey = _split(ends)
        return bool(_self_cross_jit(sx, sy, ex, ey, closed))
    m = len(starts)
    idx = np.arange(m)
    diff = np.abs(idx[:, None] - idx[None, :])
    mask = diff <= 1
    if closed:
        mask |= diff == m - 1
    return bool(_pairs_cross_np(starts, ends, starts, ends, mask).any())


def any_cross(sa, ea, sb, eb) -> bool:
    """Whether any segment of family a properly crosses any of family b."""
    if HAVE_NUMBA:
        ax, ay = _split(sa)
        bx, by = _split(ea)
        cx, cy = _split(sb)
        dx, dy = _split(eb)
        return bool(_any_cross_jit(ax, ay, bx, by, cx, cy, dx, dy))
    return bool(_pairs_cross_np(sa, ea, sb, eb).any())


def min_sq_point_seg(points, a, b) -> float:
    """Minimum squared distance from any point to any segment [a_j, b_j]."""
    if HAVE_NUMBA:
        px, py = _split(points)
        ax, ay = _split(a)
        bx, by = _split(b)
        return float(_min_sq_point_seg_jit(px, py, ax, ay, bx, by))
    return float(_point_segment_sq_np(points, a, b).min())


def all_points_in_polygon(points, polygon) -> bool:
    """Even-odd test for every query point against a closed polygon."""
    if HAVE_NUMBA:
        px, py = _split(points)
        vx, vy = _split(polygon)
        return bool(_all_points_in_polygon_jit(px, py, vx, vy))
    from matplotlib.path import Path
    return bool(Path(polygon).contains_points(points).all())


# numpy fallbacks ----------------------------------------------------------


def _pairs_cross_np(p0, p1, q0, q1, skip_mask=None):
    ex = p1[:, 0] - p0[:, 0]
    ey = p1[:, 1] - p0[:, 1]
    fx = q1[:, 0] - q0[:, 0]
    fy = q1[:, 1] - q0[:, 1]
    rx = q0[None, :, 0] - p0[:, None, 0]
    ry = q0[None, :, 1] - p0[:, None, 1]
    d1 = ex[:, None] * ry - ey[:, None] * rx
    d2 = d1 + ex[:, None] * fy[None, :] - ey[:, None] * fx[None, :]
    d3 = fy[None, :] * rx - fx[None, :] * ry
    d4 = d3 + fx[None, :] * ey[:, None] - fy[None, :] * ex[:, None]
    hits = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)
    if skip_mask is not None:
        hits &= ~skip_mask
    return hits


def _point_segment_sq_np(points, a, b):
    abx = b[:, 0] - a[:, 0]
    aby = b[:, 1] - a[:, 1]
    denom = abx * abx + aby * aby
    apx = points[:, 0][:, None] - a[None, :, 0]
    apy = points[:, 1][:, None] - a[None, :, 1]
    t = (apx * abx[None, :] + apy * aby[None, :]) / denom[None, :]
    np.clip(t, 0.0, 1.0, out=t)
    apx -= t * abx[None, :]
    apy -= t * aby[None, :]
    apx *= apx
    apy *= apy
    apx += apy
    return apx
