# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; semantics mirror ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, cos, sin, fabs, hypot, isfinite, INFINITY

cnp.import_array()

DEF EXP_OVERFLOW = 700.0

EXP = 0
QUAD = 1


cdef inline bint _apply(int family, double cr, double ci, double c1r,
                        double *zr, double *zi, double *dr, double *di) nogil:
    """z <- f(z); (dr, di) <- f'(z_old). Returns False on overflow."""
    cdef double x = zr[0], y = zi[0], e, em1, s2
    if family == 0:
        if x > EXP_OVERFLOW:
            return False
        em1 = expm1(x)
        e = em1 + 1.0
        s2 = sin(0.5 * y)
        dr[0] = e * cos(y)
        di[0] = e * sin(y)
        zr[0] = em1 * cos(y) - 2.0 * s2 * s2 + c1r
        zi[0] = di[0] + ci
        if zr[0] > EXP_OVERFLOW:
            return False
    else:
        dr[0] = 2.0 * x
        di[0] = 2.0 * y
        zr[0] = x * x - y * y + cr
        zi[0] = 2.0 * x * y + ci
    return isfinite(zr[0]) and isfinite(zi[0])


def escape_time(int family, c, z, int max_iter, double radius):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    cdef Py_ssize_t n = zz.shape[0], i
    cdef cnp.ndarray[cnp.int32_t, ndim=1] counts = np.full(n, max_iter, dtype=np.int32)
    cdef double cr = complex(c).real, ci = complex(c).imag
    cdef double c1r = 1.0 + cr
    cdef double xr, xi, dr, di, r2 = radius * radius
    cdef int k
    with nogil:
        for i in range(n):
            xr = zz[i].real
            xi = zz[i].imag
            for k in range(max_iter):
                if not _apply(family, cr, ci, c1r, &xr, &xi, &dr, &di) \
                        or xr * xr + xi * xi > r2 \
                        or (family == 0 and xr > EXP_OVERFLOW):
                    counts[i] = k
                    break
    return counts


def recurrence(int family, c, int p, z0, int n_iter, double radius):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z0, dtype=np.complex128).ravel()
    cdef Py_ssize_t n = zz.shape[0], i
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] alive = np.ones(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] min_ret = np.full(n, INFINITY)
    cdef double cr = complex(c).real, ci = complex(c).imag
    cdef double c1r = 1.0 + cr
    cdef double sr, si, xr, xi, dr, di, d, best, r2 = radius * radius
    cdef int k, j
    cdef bint ok
    with nogil:
        for i in range(n):
            sr = zz[i].real
            si = zz[i].imag
            xr = sr
            xi = si
            best = INFINITY
            for k in range(n_iter):
                ok = True
                for j in range(p):
                    if not _apply(family, cr, ci, c1r, &xr, &xi, &dr, &di):
                        ok = False
                        break
                if not ok or xr * xr + xi * xi > r2 or (family == 0 and xr > EXP_OVERFLOW):
                    alive[i] = 0
                    break
                d = hypot(xr - sr, xi - si)
                if d < best:
                    best = d
            min_ret[i] = best
    return alive.astype(bool), min_ret


def newton(int family, c, int p, seeds, int max_iter, double step_tol):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.array(seeds, dtype=np.complex128, copy=True).ravel()
    cdef Py_ssize_t n = zz.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res = np.empty(n)
    cdef double cr = complex(c).real, ci = complex(c).imag
    cdef double c1r = 1.0 + cr
    cdef double xr, xi, wr, wi, pr, pi_, dr, di, tr, gr, gi, hr, hi, den, sr, si
    cdef int it, j
    cdef bint ok
    with nogil:
        for i in range(n):
            xr = zz[i].real
            xi = zz[i].imag
            ok = True
            for it in range(max_iter):
                wr = xr
                wi = xi
                pr = 1.0
                pi_ = 0.0
                for j in range(p):
                    if not _apply(family, cr, ci, c1r, &wr, &wi, &dr, &di):
                        ok = False
                        break
                    tr = pr * dr - pi_ * di
                    pi_ = pr * di + pi_ * dr
                    pr = tr
                if not ok:
                    break
                gr = wr - xr
                gi = wi - xi
                hr = pr - 1.0
                hi = pi_
                den = hr * hr + hi * hi
                if den == 0.0:
                    ok = False
                    break
                sr = (gr * hr + gi * hi) / den
                si = (gi * hr - gr * hi) / den
                if not (isfinite(sr) and isfinite(si)):
                    ok = False
                    break
                xr = xr - sr
                xi = xi - si
                if hypot(sr, si) < step_tol * (1.0 + hypot(xr, xi)):
                    break
            if ok:
                wr = xr
                wi = xi
                for j in range(p):
                    if not _apply(family, cr, ci, c1r, &wr, &wi, &dr, &di):
                        ok = False
                        break
            zz[i].real = xr
            zz[i].imag = xi
            if ok:
                res[i] = hypot(wr - xr, wi - xi)
                if not isfinite(res[i]):
                    res[i] = INFINITY
            else:
                res[i] = INFINITY
    return zz, res


def crossing_parity(vx, vy, px, py):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax = np.ascontiguousarray(vx, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ay = np.ascontiguousarray(vy, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qx = np.ascontiguousarray(px, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qy = np.ascontiguousarray(py, dtype=np.float64).ravel()
    cdef Py_ssize_t nv = ax.shape[0], npts = qx.shape[0], i, k, k1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] inside = np.zeros(npts, dtype=np.uint8)
    cdef double x, y, xc
    cdef unsigned char par
    with nogil:
        for i in range(npts):
            x = qx[i]
            y = qy[i]
            par = 0
            for k in range(nv):
                k1 = k + 1
                if k1 == nv:
                    k1 = 0
                if (ay[k] > y) != (ay[k1] > y):
                    xc = ax[k] + (y - ay[k]) * (ax[k1] - ax[k]) / (ay[k1] - ay[k])
                    if x < xc:
                        par ^= 1
            inside[i] = par
    return inside.astype(bool)


def polyline_distance(vx, vy, px, py):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax = np.ascontiguousarray(vx, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ay = np.ascontiguousarray(vy, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qx = np.ascontiguousarray(px, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qy = np.ascontiguousarray(py, dtype=np.float64).ravel()
    cdef Py_ssize_t nv = ax.shape[0], npts = qx.shape[0], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(npts)
    cdef double x, y, dx, dy, ll, t, d, best
    with nogil:
        for i in range(npts):
            x = qx[i]
            y = qy[i]
            if nv == 1:
                out[i] = hypot(x - ax[0], y - ay[0])
                continue
            best = INFINITY
            for k in range(nv - 1):
                dx = ax[k + 1] - ax[k]
                dy = ay[k + 1] - ay[k]
                ll = dx * dx + dy * dy
                t = 0.0
                if ll > 0:
                    t = ((x - ax[k]) * dx + (y - ay[k]) * dy) / ll
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                d = hypot(x - ax[k] - t * dx, y - ay[k] - t * dy)
                if d < best:
                    best = d
            out[i] = best
    return out
