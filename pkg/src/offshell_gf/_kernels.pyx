# cython: language_level=3
"""Compiled implementation of the hot numerical kernels.

Same functions, same algorithms and the same evaluation order as
`_kernels_py`; `backend.py` picks one of the two at import time.  Inputs
broadcast like the pure version; everything loops over the broadcast
elements in C.  j0/j1 delegate to the shared series/recurrence code so
the two backends agree to the last bit there.
"""

import numpy as np

cimport cython
from libc.math cimport M_PI, atan, erf, exp, fabs, log, pow, sqrt

from .bessel import j0j1 as _j0j1

BACKEND_NAME = "compiled"

cdef double _INV4PI2 = 1.0 / (4.0 * M_PI * M_PI)
cdef double _INV8PI3 = 1.0 / (8.0 * M_PI * M_PI * M_PI)
cdef double _INV4PI3 = 1.0 / (4.0 * M_PI * M_PI * M_PI)
cdef double _EIGHT_PI3 = 8.0 * (M_PI ** 3)
cdef double _CUBE_2PI = (2.0 * M_PI) ** 3
cdef double _SQRTPI = sqrt(M_PI)
cdef double _NAN = float("nan")

REGION_TIMELIKE5 = 0
REGION_SPACELIKE4 = 1
REGION_MIXED = 2
REGION_CONE4 = 3
REGION_CONE5 = 4


def j0j1_batch(x):
    return _j0j1(np.asarray(x, dtype=np.float64))


cdef _prep3(t, r, tau):
    arrs = np.broadcast_arrays(np.asarray(t, dtype=np.float64),
                               np.asarray(r, dtype=np.float64),
                               np.asarray(tau, dtype=np.float64))
    shape = arrs[0].shape
    return (shape,
            np.ascontiguousarray(arrs[0]).ravel(),
            np.ascontiguousarray(arrs[1]).ravel(),
            np.ascontiguousarray(arrs[2]).ravel())


@cython.boundscheck(False)
@cython.wraparound(False)
def region_code_batch(t, r, tau, double eps):
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    out = np.empty(tv.shape[0], dtype=np.int8)
    cdef signed char[::1] ov = out
    cdef Py_ssize_t i
    cdef double x2, Q, band, s
    for i in range(tv.shape[0]):
        x2 = rv[i] * rv[i] - tv[i] * tv[i]
        Q = -x2 - uv[i] * uv[i]
        s = tv[i] * tv[i] + rv[i] * rv[i] + uv[i] * uv[i]
        band = eps * (s if s > 1.0 else 1.0)
        if fabs(Q) <= band:
            ov[i] = 4
        elif fabs(x2) <= band:
            ov[i] = 3
        elif Q > 0.0:
            ov[i] = 0
        elif x2 > 0.0:
            ov[i] = 1
        else:
            ov[i] = 2
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def canonical_batch(t, r, tau):
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    out = np.zeros(tv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double Q
    for i in range(tv.shape[0]):
        Q = tv[i] * tv[i] - rv[i] * rv[i] - uv[i] * uv[i]
        if Q > 0.0:
            ov[i] = _INV4PI2 * pow(Q, -1.5)
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def retarded_batch(t, r, tau):
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    out = np.zeros(tv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double Q, step
    for i in range(tv.shape[0]):
        Q = tv[i] * tv[i] - rv[i] * rv[i] - uv[i] * uv[i]
        if Q > 0.0:
            step = 2.0 if uv[i] > 0.0 else (1.0 if uv[i] == 0.0 else 0.0)
            ov[i] = step * (_INV4PI2 * pow(Q, -1.5))
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def principal_o41_batch(t, r, tau):
    out = canonical_batch(t, r, tau)
    np.negative(out, out=out)
    return out


@cython.boundscheck(False)
@cython.wraparound(False)
def principal_o32_batch(t, r, tau):
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    out = np.zeros(tv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double u
    for i in range(tv.shape[0]):
        u = rv[i] * rv[i] - tv[i] * tv[i] - uv[i] * uv[i]
        if u > 0.0:
            ov[i] = _INV4PI2 * pow(u, -1.5)
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def oh_published_batch(t, r, tau):
    """Literal transcription of the two-branch k5-first published form,
    including its defects; NaN on its own singular loci."""
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    out = np.empty(tv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double x2, Q, pref, tt, q, ang, s, ratio, val
    for i in range(tv.shape[0]):
        x2 = rv[i] * rv[i] - tv[i] * tv[i]
        Q = -x2 - uv[i] * uv[i]
        tt = uv[i]
        pref = (2.0 if tt > 0.0 else (1.0 if tt == 0.0 else 0.0)) / _CUBE_2PI
        if x2 == 0.0:
            val = _NAN
        elif pref > 0.0:
            if Q > 0.0:
                q = Q
                ang = atan(sqrt(q) / tt) if tt != 0.0 else 0.5 * M_PI
                val = pow(q, -1.5) * ang - tt / (x2 * (x2 + tt * tt))
            elif Q < 0.0:
                q = Q
                s = sqrt(tt * tt + x2)
                ratio = fabs((tt - s) / (tt + s))
                val = 0.5 * pow(-q, -1.5) * log(ratio) \
                    - tt / (x2 * (x2 + tt * tt))
            else:
                val = _NAN
        else:
            val = 0.0
        ov[i] = pref * val
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def k5_route_batch(t, r, tau):
    """Analytic sum of the two k5-first pieces (arctan terms cancelled);
    exact zero outside the 5D cone."""
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    out = np.zeros(tv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double Q, b, rr
    for i in range(tv.shape[0]):
        Q = tv[i] * tv[i] - rv[i] * rv[i] - uv[i] * uv[i]
        if Q > 0.0:
            b = sqrt(Q)
            rr = rv[i]
            if rr > 0.0:
                ov[i] = (2.0 * M_PI * rr / pow(b, 3.0)) / (_EIGHT_PI3 * rr)
            else:
                ov[i] = (2.0 * M_PI / pow(b, 3.0)) * _INV8PI3
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def g1g2_batch(t, r, tau):
    """Two k5-first pieces with the radial derivative applied analytically;
    NaN at tau = 0 and on Q = 0."""
    shape, tb, rb, ub = _prep3(t, r, tau)
    cdef double[::1] tv = tb, rv = rb, uv = ub
    g1 = np.full(tv.shape[0], np.nan, dtype=np.float64)
    g2 = np.full(tv.shape[0], np.nan, dtype=np.float64)
    cdef double[::1] g1v = g1, g2v = g2
    cdef Py_ssize_t i
    cdef double a, Q, b, rho2, ang, S, x2, L, core
    for i in range(tv.shape[0]):
        a = fabs(uv[i])
        if not a > 0.0:
            continue
        Q = tv[i] * tv[i] - rv[i] * rv[i] - uv[i] * uv[i]
        if Q > 0.0:
            b = sqrt(Q)
            rho2 = a * a + b * b
            ang = atan(a / b)
            g1v[i] = _INV4PI3 * (ang / pow(b, 3.0) + a / (b * b * rho2))
            g2v[i] = _INV4PI3 * ((M_PI - ang) / pow(b, 3.0)
                                 - a / (b * b * rho2))
        elif Q < 0.0:
            S = sqrt(-Q)
            x2 = S * S - a * a
            L = log((S + a) / fabs(S - a))
            core = _INV8PI3 * (L / pow(S, 3.0) + 2.0 * a / (S * S * x2))
            g1v[i] = core
            g2v[i] = -core
    return g1.reshape(shape), g2.reshape(shape)


# ---------------------------------------------------------------------------
# static-convolution profile kernels
# ---------------------------------------------------------------------------

cdef inline void _branch(double lo, double hi, double mu, double wt,
                         double *i0, double *i2) nogil:
    cdef double ua = (lo - mu) / wt
    cdef double ub = (hi - mu) / wt
    cdef double e_a = exp(-ua * ua)
    cdef double e_b = exp(-ub * ub)
    cdef double erf_d = erf(ub) - erf(ua)
    cdef double a1 = 0.5 * (e_a - e_b)
    cdef double a2 = 0.5 * (ua * e_a - ub * e_b) + 0.25 * _SQRTPI * erf_d
    i0[0] = 0.5 * _SQRTPI * wt * erf_d
    i2[0] = mu * mu * i0[0] + 2.0 * mu * wt * wt * a1 + pow(wt, 3.0) * a2


cdef inline double _piece_scalar(double ulo, double uhi, double alpha,
                                 double beta, double mu, double wt) nogil:
    cdef double slo, shi, i0p, i2p, i0m, i2m
    if ulo < 0.0:
        ulo = 0.0
    if not (uhi > ulo):
        return 0.0
    slo = sqrt(ulo)
    shi = sqrt(uhi if uhi > 0.0 else 0.0)
    _branch(slo, shi, mu, wt, &i0p, &i2p)
    _branch(-shi, -slo, mu, wt, &i0m, &i2m)
    return alpha * (i0p + i0m) + beta * (i2p + i2m)


@cython.boundscheck(False)
@cython.wraparound(False)
def static_profile_batch(rp, t, r, double t0, double wt, double ha):
    """Time-profile-weighted shell overlap for the static convolution;
    see the pure version for the geometry."""
    shape, pb, tb, rb = _prep3(rp, t, r)
    cdef double[::1] pv = pb, tv = tb, rv = rb
    out = np.empty(pv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double R1s, R2s, b1, b2, b3, b4, lo2, hi2, plateau, mu, acc
    for i in range(pv.shape[0]):
        R1s = (rv[i] - pv[i]) * (rv[i] - pv[i])
        R2s = (rv[i] + pv[i]) * (rv[i] + pv[i])
        b1 = R1s - ha
        b2 = R1s + ha
        b3 = R2s - ha
        b4 = R2s + ha
        lo2 = b2 if b2 < b3 else b3
        hi2 = b2 if b2 > b3 else b3
        plateau = 2.0 * ha
        if 4.0 * rv[i] * pv[i] < plateau:
            plateau = 4.0 * rv[i] * pv[i]
        mu = tv[i] - t0
        acc = _piece_scalar(b1, lo2, ha - R1s, 1.0, mu, wt)
        acc += _piece_scalar(lo2, hi2, plateau, 0.0, mu, wt)
        acc += _piece_scalar(hi2, b4, R2s + ha, -1.0, mu, wt)
        ov[i] = acc
    return out.reshape(shape)


@cython.boundscheck(False)
@cython.wraparound(False)
def static_profile_origin_batch(rp, t, double t0, double wt, double ha):
    """r -> 0 limit of the overlap profile divided by 4 r rp."""
    arrs = np.broadcast_arrays(np.asarray(rp, dtype=np.float64),
                               np.asarray(t, dtype=np.float64))
    shape = arrs[0].shape
    pb = np.ascontiguousarray(arrs[0]).ravel()
    tb = np.ascontiguousarray(arrs[1]).ravel()
    cdef double[::1] pv = pb, tv = tb
    out = np.empty(pv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(pv.shape[0]):
        ov[i] = _piece_scalar(pv[i] * pv[i] - ha, pv[i] * pv[i] + ha,
                              1.0, 0.0, tv[i] - t0, wt)
    return out.reshape(shape)
