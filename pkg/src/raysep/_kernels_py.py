"""Pure numpy implementations of the hot loops.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and semantics; ``raysep.kernels`` picks one at import time.

Family codes: 0 is ``exp(z) + c`` (evaluated as ``expm1(z) + (1 + c)`` so that
fixed points near the origin keep full relative accuracy), 1 is ``z**2 + c``.
"""
import numpy as np

EXP = 0
QUAD = 1

# exp overflows just above 709; treat anything past this as escaped
EXP_OVERFLOW = 700.0

_COMPACT_EVERY = 256


def _step(family, c1, c, z):
    """One application of the map and its derivative at ``z``."""
    if family == EXP:
        em1 = np.expm1(z)
        return em1 + c1, em1 + 1.0
    return z * z + c, 2.0 * z


def _escaped(family, z, radius):
    bad = ~np.isfinite(z) | (np.abs(z) > radius)
    if family == EXP:
        bad |= z.real > EXP_OVERFLOW
    return bad


def escape_time(family, c, z, max_iter, radius):
    z = np.array(z, dtype=np.complex128, copy=True).ravel()
    c = complex(c)
    c1 = 1.0 + c
    counts = np.full(z.shape, max_iter, dtype=np.int32)
    idx = np.arange(z.size)
    with np.errstate(all="ignore"):
        for k in range(max_iter):
            if idx.size == 0:
                break
            w, _ = _step(family, c1, c, z)
            out = _escaped(family, w, radius)
            if out.any():
                counts[idx[out]] = k
                keep = ~out
                idx, w = idx[keep], w[keep]
            z = w
    return counts


def recurrence(family, c, p, z0, n_iter, radius):
    """Iterate ``f**p`` from each start point.

    Returns ``(alive, min_return)``: whether the orbit stayed finite and within
    ``radius`` for all ``n_iter`` iterates, and the smallest distance between
    an iterate ``k >= 1`` and the start point.
    """
    z0 = np.array(z0, dtype=np.complex128, copy=True).ravel()
    c = complex(c)
    c1 = 1.0 + c
    alive = np.ones(z0.shape, dtype=bool)
    min_ret = np.full(z0.shape, np.inf)
    idx = np.arange(z0.size)
    start = z0.copy()
    z = z0.copy()
    with np.errstate(all="ignore"):
        for k in range(n_iter):
            for _ in range(p):
                z, _ = _step(family, c1, c, z)
            bad = _escaped(family, z, radius) | ~alive[idx]
            d = np.abs(z - start)
            d[bad] = np.inf
            np.minimum(min_ret[idx], d, out=d)
            min_ret[idx] = d
            if bad.any():
                alive[idx[bad]] = False
                z[bad] = 0.0
            if k % _COMPACT_EVERY == 0:
                keep = alive[idx]
                idx, z, start = idx[keep], z[keep], start[keep]
                if idx.size == 0:
                    break
    return alive, min_ret


def newton(family, c, p, seeds, max_iter, step_tol):
    """Newton's method on ``f**p(z) - z`` from every seed.

    Returns the final iterates and the residuals ``|f**p(z) - z|`` there
    (``inf`` where the iteration broke down).
    """
    z = np.array(seeds, dtype=np.complex128, copy=True).ravel()
    c = complex(c)
    c1 = 1.0 + c
    active = np.ones(z.shape, dtype=bool)
    failed = np.zeros(z.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            if not active.any():
                break
            za = z[active]
            w, d = za, np.ones_like(za)
            bad = np.zeros(za.shape, dtype=bool)
            for _ in range(p):
                w, dk = _step(family, c1, c, w)
                d = d * dk
                bad |= _escaped(family, w, np.inf)
            step = (w - za) / (d - 1.0)
            bad |= ~np.isfinite(step)
            za = za - step
            done = np.abs(step) < step_tol * (1.0 + np.abs(za))
            ai = np.nonzero(active)[0]
            z[ai] = np.where(bad, z[ai], za)
            failed[ai[bad]] = True
            active[ai[bad | done]] = False
        w = z.copy()
        bad = failed.copy()
        for _ in range(p):
            w, _ = _step(family, c1, c, w)
            bad |= _escaped(family, w, np.inf)
        res = np.abs(w - z)
        res[bad | ~np.isfinite(res)] = np.inf
    return z, res


def crossing_parity(vx, vy, px, py):
    """Even-odd test of points against the closed polygon ``(vx, vy)``."""
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    px = np.asarray(px, dtype=np.float64).ravel()
    py = np.asarray(py, dtype=np.float64).ravel()
    inside = np.zeros(px.shape, dtype=bool)
    x0, y0 = vx, vy
    x1, y1 = np.roll(vx, -1), np.roll(vy, -1)
    # chunk over edges to bound memory for large rasters
    chunk = max(1, 4_000_000 // max(px.size, 1))
    for s in range(0, vx.size, chunk):
        a0, b0 = x0[s:s + chunk, None], y0[s:s + chunk, None]
        a1, b1 = x1[s:s + chunk, None], y1[s:s + chunk, None]
        straddle = (b0 > py) != (b1 > py)
        with np.errstate(all="ignore"):
            xcross = a0 + (py - b0) * (a1 - a0) / (b1 - b0)
        hits = straddle & (px < xcross)
        inside ^= (np.count_nonzero(hits, axis=0) % 2).astype(bool)
    return inside


def polyline_distance(vx, vy, px, py):
    """Distance from each point to the open polyline ``(vx, vy)``."""
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    px = np.asarray(px, dtype=np.float64).ravel()
    py = np.asarray(py, dtype=np.float64).ravel()
    best = np.full(px.shape, np.inf)
    if vx.size == 1:
        return np.hypot(px - vx[0], py - vy[0])
    chunk = max(1, 4_000_000 // max(px.size, 1))
    for s in range(0, vx.size - 1, chunk):
        e = min(s + chunk, vx.size - 1)
        ax, ay = vx[s:e, None], vy[s:e, None]
        dx, dy = vx[s + 1:e + 1, None] - ax, vy[s + 1:e + 1, None] - ay
        ll = dx * dx + dy * dy
        with np.errstate(all="ignore"):
            t = ((px - ax) * dx + (py - ay) * dy) / ll
        t = np.where(ll > 0, np.clip(t, 0.0, 1.0), 0.0)
        d = np.hypot(px - (ax + t * dx), py - (ay + t * dy))
        best = np.minimum(best, d.min(axis=0))
    return best
