"""Pure-Python (numpy) implementation of the hot numerical kernels.

The compiled extension `_kernels` implements the same functions with the
same algorithms; `backend.py` picks one at import time.  Everything here
is straight array math on float64 -- no objects, no exceptions.  Input
validation, region/error semantics and all distributional logic live in
the high-level modules.

Variant interior conventions (value NaN marks "formula undefined here";
callers decide whether that is an error):

    canonical     Q^(-3/2)/(4 pi^2) on Q > 0, else 0
    retarded      2*theta(tau)*canonical, theta(0) = 1/2
    principal 4,1 -canonical (equal magnitude, opposite sign)
    principal 3,2 (x2 - tau^2)^(-3/2)/(4 pi^2) on x2 - tau^2 > 0, else 0
    two-piece g1/g2 and their analytic sum: see eval_g1_g2 / eval_k5_route
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf as _erf

from .bessel import j0j1 as _j0j1

BACKEND_NAME = "python"

_PI = np.pi
_INV4PI2 = 1.0 / (4.0 * _PI * _PI)
_INV8PI3 = 1.0 / (8.0 * _PI ** 3)
_INV4PI3 = 1.0 / (4.0 * _PI ** 3)

REGION_TIMELIKE5 = 0
REGION_SPACELIKE4 = 1
REGION_MIXED = 2
REGION_CONE4 = 3
REGION_CONE5 = 4


def j0j1_batch(x: np.ndarray):
    return _j0j1(np.asarray(x, dtype=np.float64))


def region_code_batch(t, r, tau, eps: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    x2 = r * r - t * t
    Q = -x2 - tau * tau
    band = eps * np.maximum(1.0, t * t + r * r + tau * tau)
    out = np.full(np.broadcast(t, r, tau).shape, REGION_MIXED, dtype=np.int8)
    out[np.abs(x2) <= band] = REGION_CONE4
    out[np.abs(Q) <= band] = REGION_CONE5
    open_r = (np.abs(Q) > band) & (np.abs(x2) > band)
    out[open_r & (Q > 0)] = REGION_TIMELIKE5
    out[open_r & (Q < 0) & (x2 > 0)] = REGION_SPACELIKE4
    return out


def canonical_batch(t, r, tau) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    Q = t * t - r * r - tau * tau
    pos = Q > 0
    out = np.zeros(Q.shape, dtype=np.float64)
    out[pos] = _INV4PI2 * Q[pos] ** -1.5
    return out


def retarded_batch(t, r, tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=np.float64)
    step = np.where(tau > 0, 2.0, np.where(tau == 0, 1.0, 0.0))
    return step * canonical_batch(t, r, tau)


def principal_o41_batch(t, r, tau) -> np.ndarray:
    return -canonical_batch(t, r, tau)


def principal_o32_batch(t, r, tau) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    u = r * r - t * t - tau * tau
    pos = u > 0
    out = np.zeros(u.shape, dtype=np.float64)
    out[pos] = _INV4PI2 * u[pos] ** -1.5
    return out


def oh_published_batch(t, r, tau) -> np.ndarray:
    """Literal transcription of the two-branch k5-first published form,
    including its defects; NaN on its own singular loci (x2 = 0 or a cone)."""
    t = np.asarray(t, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    x2 = r * r - t * t
    Q = -x2 - tau * tau
    pref = np.where(tau > 0, 2.0, np.where(tau == 0, 1.0, 0.0)) / (2.0 * _PI) ** 3
    out = np.zeros(np.broadcast(t, r, tau).shape, dtype=np.float64)
    out[x2 == 0.0] = np.nan
    live = (pref > 0) & (x2 != 0.0)

    tl = live & (Q > 0)
    if tl.any():
        q = Q[tl]
        tt = tau[tl]
        # atan(sqrt(Q)/tau): tau = 0 enters as the tau -> 0+ limit pi/2
        ang = np.where(tt != 0, np.arctan(np.sqrt(q) / np.where(tt != 0, tt, 1.0)),
                       0.5 * _PI)
        out[tl] = q ** -1.5 * ang - tt / (x2[tl] * (x2[tl] + tt * tt))

    sl = live & (Q < 0)
    if sl.any():
        q = Q[sl]
        tt = tau[sl]
        s = np.sqrt(tt * tt + x2[sl])          # = sqrt(-Q) > 0 here
        ratio = np.abs((tt - s) / (tt + s))
        out[sl] = 0.5 * (-q) ** -1.5 * np.log(ratio) \
            - tt / (x2[sl] * (x2[sl] + tt * tt))

    out[live & (Q == 0.0)] = np.nan
    return pref * out


def k5_route_batch(t, r, tau) -> np.ndarray:
    """Analytic sum of the two k5-first pieces: the arctan terms cancel,
    leaving d/dr of (2 pi / b) under the 1/((2 pi)^3 r) prefactor inside
    the 5D cone; exact zero outside by the piece antisymmetry."""
    t = np.asarray(t, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    Q = t * t - r * r - tau * tau
    out = np.zeros(np.broadcast(t, r, tau).shape, dtype=np.float64)
    pos = Q > 0
    if pos.any():
        b = np.sqrt(Q[pos])
        rr = np.broadcast_to(r, out.shape)[pos]
        bracket_dr = 2.0 * _PI * rr / b ** 3      # d/dr [2 pi / b]
        with np.errstate(invalid="ignore", divide="ignore"):
            val = np.where(rr > 0, bracket_dr / (8.0 * _PI ** 3 * rr),
                           (2.0 * _PI / b ** 3) * _INV8PI3)
        out[pos] = val
    return out


def g1g2_batch(t, r, tau):
    """Two k5-first pieces with the radial derivative applied analytically.

    Returns (g1, g2); NaN at tau = 0 (the caller raises there).  Inside the
    5D cone the pieces carry the arctan split; outside, the log split with
    S = sqrt(tau^2 + r^2 - t^2), and g2 = -g1 exactly."""
    t = np.asarray(t, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    shape = np.broadcast(t, r, tau).shape
    g1 = np.full(shape, np.nan, dtype=np.float64)
    g2 = np.full(shape, np.nan, dtype=np.float64)
    a = np.abs(np.broadcast_to(tau, shape))
    Q = t * t - r * r - tau * tau
    Q = np.broadcast_to(Q, shape)
    ok = a > 0

    tl = ok & (Q > 0)
    if tl.any():
        b = np.sqrt(Q[tl])
        aa = a[tl]
        rho2 = aa * aa + b * b                  # = t^2 - r^2
        ang = np.arctan(aa / b)
        g1[tl] = _INV4PI3 * (ang / b ** 3 + aa / (b * b * rho2))
        g2[tl] = _INV4PI3 * ((_PI - ang) / b ** 3 - aa / (b * b * rho2))

    sp = ok & (Q < 0)
    if sp.any():
        aa = a[sp]
        S = np.sqrt(-Q[sp])                     # sqrt(tau^2 + r^2 - t^2)
        x2 = S * S - aa * aa                    # r^2 - t^2, either sign
        L = np.log((S + aa) / np.abs(S - aa))
        core = _INV8PI3 * (L / S ** 3 + 2.0 * aa / (S * S * x2))
        g1[sp] = core
        g2[sp] = -core
    return g1, g2


def static_profile_batch(rp, t, r, t0, wt, ha):
    """Time-profile-weighted shell overlap for the static convolution.

    For source radius rp (array) and field point (t, r > 0): integrates the
    Gaussian time profile exp(-((t' - t0)/wt)^2) against the piecewise-linear
    overlap between the mollifier window of half-width `ha` (in the squared
    interval) and the shell-intersection range [(r-rp)^2, (r+rp)^2], as a
    function of U = (t - t')^2.  Closed form via erf/Gaussian moments."""
    rp = np.asarray(rp, dtype=np.float64)
    R1s = (r - rp) ** 2
    R2s = (r + rp) ** 2
    b1 = R1s - ha
    b2 = R1s + ha
    b3 = R2s - ha
    b4 = R2s + ha
    lo2 = np.minimum(b2, b3)
    hi2 = np.maximum(b2, b3)
    plateau = np.minimum(2.0 * ha, 4.0 * r * rp)
    mu = t - t0

    out = np.zeros(np.broadcast(rp, np.asarray(t), np.asarray(r)).shape)
    # piece 1: rising edge, OVLP = U + ha - R1s
    out += _piece_moment(b1, lo2, ha - R1s, 1.0, mu, wt)
    # piece 2: plateau
    out += _piece_moment(lo2, hi2, plateau, 0.0, mu, wt)
    # piece 3: falling edge, OVLP = R2s + ha - U
    out += _piece_moment(hi2, b4, R2s + ha, -1.0, mu, wt)
    return out


def static_profile_origin_batch(rp, t, t0, wt, ha):
    """r -> 0 limit of the overlap profile divided by 4 r rp: the time
    window where |rp^2 - U| < ha, integrated against the time profile."""
    rp = np.asarray(rp, dtype=np.float64)
    return _piece_moment(rp * rp - ha, rp * rp + ha, 1.0, 0.0, t - t0, wt)


def _piece_moment(ulo, uhi, alpha, beta, mu, wt):
    """integral over {t': (t-t')^2 in [ulo, uhi]} of B(t')*(alpha + beta*U),
    U = (t-t')^2, B a unit Gaussian of width wt centered so that the offset
    of delta = t - t' is mu.  Sums both delta-sign branches."""
    ulo = np.maximum(ulo, 0.0)
    live = uhi > ulo
    slo = np.sqrt(np.where(live, ulo, 0.0))
    shi = np.sqrt(np.where(live, np.maximum(uhi, 0.0), 0.0))

    def branch(lo, hi):
        ua = (lo - mu) / wt
        ub = (hi - mu) / wt
        e_a = np.exp(-ua * ua)
        e_b = np.exp(-ub * ub)
        erf_d = _erf(ub) - _erf(ua)
        i0 = 0.5 * np.sqrt(_PI) * wt * erf_d
        # moments of delta^2 = (mu + wt*u)^2 against exp(-u^2)
        a1 = 0.5 * (e_a - e_b)
        a2 = 0.5 * (ua * e_a - ub * e_b) + 0.25 * np.sqrt(_PI) * erf_d
        i2 = mu * mu * i0 + 2.0 * mu * wt * wt * a1 + wt ** 3 * a2
        return i0, i2

    i0p, i2p = branch(slo, shi)
    i0m, i2m = branch(-shi, -slo)
    val = alpha * (i0p + i0m) + beta * (i2p + i2m)
    return np.where(live, val, 0.0)
