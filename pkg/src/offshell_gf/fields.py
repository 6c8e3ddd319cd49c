"""Field assembly: convolving the retarded kernel with model currents.

The retarded kernel is taken as twice the even kernel gated on positive
fifth-coordinate separation (exact for sources uniform in the fifth
coordinate), with an overall kernel_scale knob so the published
normalization can be metered against the wave equation itself.

Because the even kernel is a finite-part distribution, the convolution
uses a window mollification in the squared-interval variable: the kernel
is averaged over a window of half-width `ha` centered on the cone (the
finite-part limit is the window -> 0 limit; the window bias is O(ha^2)
and is kept far below the grid's stencil floor).  Two integration paths:

  static analytic  -- sources uniform in the fifth coordinate with a
      Gaussian time profile: the fifth-coordinate and angular integrals
      are exact, the time integral is exact via erf moments
      (kernels.static_profile_batch), leaving one radial quadrature.
  general          -- per-point 3D quadrature over (t', tau', r') with
      the angular integral exact (square-root core); used for
      fifth-coordinate-windowed sources and worldline models.  Points
      that cannot be reached causally short-circuit to exactly 0.0.

residual() applies the second-order five-point stencil of the operator
(-d_tt + radial Laplacian + d_tautau) and compares against the source,
reporting both the relative error and a Richardson estimate of the
stencil's own discretization floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .backend import kernels
from .core import DOMAIN_TRUNCATED, DomainError, GRID_TOO_COARSE
from .quadrature import gauss_legendre

_PI = math.pi

STATIC_GAUSSIAN = "static_gaussian"
UNIFORM_WORLDLINE = "uniform_worldline"


@dataclass(frozen=True)
class CurrentModel:
    """Spherically symmetric current model.

    STATIC_GAUSSIAN: amplitude * exp(-((t-t_center)/t_width)^2)
        * exp(-(r/r_width)^2), optionally windowed in the fifth
        coordinate by a Gaussian (tau_window = (center, width)); with no
        window the source is uniform in the fifth coordinate.
    UNIFORM_WORLDLINE: a smeared charge at rest -- uniform in t,
        amplitude * exp(-(r/r_width)^2) times the (required) fifth-
        coordinate window."""
    kind: str = STATIC_GAUSSIAN
    amplitude: float = 1.0
    t_center: float = 0.0
    t_width: float = 0.35
    r_width: float = 0.25
    tau_window: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in (STATIC_GAUSSIAN, UNIFORM_WORLDLINE):
            raise DomainError(f"unknown current model kind: {self.kind!r}")
        if self.t_width <= 0 or self.r_width <= 0:
            raise DomainError("model widths must be positive")
        if self.kind == UNIFORM_WORLDLINE and self.tau_window is None:
            raise DomainError("uniform_worldline requires tau_window")
        if self.tau_window is not None and self.tau_window[1] <= 0:
            raise DomainError("tau_window width must be positive")

    def density(self, t, r, tau):
        t = np.asarray(t, dtype=np.float64)
        r = np.asarray(r, dtype=np.float64)
        tau = np.asarray(tau, dtype=np.float64)
        out = self.amplitude * np.exp(-(r / self.r_width) ** 2)
        if self.kind == STATIC_GAUSSIAN:
            out = out * np.exp(-((t - self.t_center) / self.t_width) ** 2)
        if self.tau_window is not None:
            c, w = self.tau_window
            out = out * np.exp(-((tau - c) / w) ** 2)
        return out


@dataclass(frozen=True)
class FieldGrid:
    nt: int = 64
    nr: int = 64
    ntau: int = 64
    t_span: Tuple[float, float] = (-2.0, 2.0)
    r_span: Tuple[float, float] = (0.0, 4.0)
    tau_span: Tuple[float, float] = (-2.0, 2.0)

    def __post_init__(self):
        if min(self.nt, self.nr, self.ntau) < 8:
            raise DomainError("grid needs at least 8 points per axis")
        if self.r_span[0] != 0.0:
            raise DomainError("radial axis must start at r = 0")

    def axes(self):
        return (np.linspace(*self.t_span, self.nt),
                np.linspace(*self.r_span, self.nr),
                np.linspace(*self.tau_span, self.ntau))

    def spacings(self):
        return ((self.t_span[1] - self.t_span[0]) / (self.nt - 1),
                (self.r_span[1] - self.r_span[0]) / (self.nr - 1),
                (self.tau_span[1] - self.tau_span[0]) / (self.ntau - 1))


@dataclass(frozen=True)
class FieldResult:
    values: np.ndarray          # shape (nt, nr, ntau)
    flags: Tuple[str, ...] = ()

    def __array__(self, dtype=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class ResidualResult:
    rel_l2: float
    pointwise_max: float
    stencil_err_rel: float
    flags: Tuple[str, ...] = ()

    def __iter__(self):
        return iter((self.rel_l2, self.pointwise_max))


def _gl_panels(lo: float, hi: float, n_panels: int, n: int):
    xg, wg = gauss_legendre(n)
    edges = np.linspace(lo, hi, n_panels + 1)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + h[:, None] * xg[None, :]).ravel()
    w = (h[:, None] * wg[None, :]).ravel()
    return x, w


# ---------------------------------------------------------------------------
# static analytic path
# ---------------------------------------------------------------------------

def _static_field_2d(model: CurrentModel, t_ax: np.ndarray, r_ax: np.ndarray,
                     kappa_s: float, ha: float, density: float) -> np.ndarray:
    """Field of a fifth-uniform Gaussian-in-time source on a (t, r) sheet.

    a(t, r) = kappa_s q / (2 r Da) * int dr' r' rho(r') P(r'; t, r) with
    P the erf-moment time profile of the window overlap and Da = 2 ha;
    separate exact limit at r = 0."""
    q = model.amplitude
    da = 2.0 * ha
    # the window overlap varies on the scale sqrt(ha) in the source radius,
    # so the panel width must track it or refinement stalls on quadrature
    n_pan = max(16, int(math.ceil(16.0 * model.r_width * density
                                  / math.sqrt(ha))))
    rp, wp = _gl_panels(0.0, 8.0 * model.r_width, n_pan, 12)
    rho = np.exp(-(rp / model.r_width) ** 2)

    out = np.empty((t_ax.size, r_ax.size))
    pos = r_ax > 0
    t2 = np.repeat(t_ax, np.count_nonzero(pos))[:, None]
    r2 = np.tile(r_ax[pos], t_ax.size)[:, None]
    wgt = (rho * rp * wp)[None, :]
    vals = np.empty(t2.size)
    step = max(1, int(4e6 // max(rp.size, 1)))   # bound the broadcast temporaries
    for lo in range(0, t2.size, step):
        hi = min(lo + step, t2.size)
        prof = kernels.static_profile_batch(rp[None, :], t2[lo:hi], r2[lo:hi],
                                            model.t_center, model.t_width, ha)
        vals[lo:hi] = (prof * wgt).sum(axis=-1)
    out[:, pos] = (kappa_s * q / (2.0 * da)) * vals.reshape(
        t_ax.size, -1) / r_ax[pos][None, :]
    if np.any(~pos):
        prof0 = kernels.static_profile_origin_batch(
            rp[None, :], t_ax[:, None], model.t_center, model.t_width, ha)
        v0 = (prof0 * (rho * rp * rp * wp)[None, :]).sum(axis=-1)
        out[:, ~pos] = ((2.0 * kappa_s * q / da) * v0)[:, None]
    return out


# ---------------------------------------------------------------------------
# general path
# ---------------------------------------------------------------------------

def _sigma_nodes(density: float):
    """Fixed chart nodes on [0, 1] for _shell_moment: thin panels at both
    ends (sig -> 0 resolves near-tangent cone crossings, sig -> 1 resolves
    source bumps that sit at small U when the field point is near the
    axis)."""
    base = np.array([0.0, 0.04, 0.12, 0.3, 0.6, 0.85, 0.96, 0.99, 1.0])
    k = max(1, int(math.ceil(density)))
    if k > 1:
        base = np.unique(np.concatenate(
            [np.linspace(base[i], base[i + 1], k + 1)
             for i in range(base.size - 1)]))
    xg, wg = gauss_legendre(10)
    h = 0.5 * np.diff(base)
    mid = 0.5 * (base[:-1] + base[1:])
    sig = (mid[:, None] + h[:, None] * xg[None, :]).ravel()
    wsig = (h[:, None] * wg[None, :]).ravel()
    return sig, wsig


def _shell_moment(c, r, wr, sig, wsig):
    """int_0^{min(c,Us)} dU (c - U)^{-1/2} m(U) with Us = (r + 8 wr)^2 and

        m(U) = (1/r) int_{|r-sqrt(U)|}^{r+sqrt(U)} s exp(-(s/wr)^2) ds
             = -(wr^2/2r) expm1(-4 r sqrt(U)/wr^2) exp(-(sqrt(U)-r)^2/wr^2)

    the closed-form radial Gaussian moment over the shell overlap (smooth
    through r = 0, where it tends to 2 sqrt(U) exp(-U/wr^2)).  Chart
    U = L (1 - sig^2), L = min(c, Us): for c <= Us this absorbs the
    square-root endpoint exactly; for c > Us the integrand is smooth and
    the nodes track the source bump.  c <= 0 gives exactly zero."""
    us = (r + 8.0 * wr) ** 2
    cc = np.maximum(c, 0.0)[..., None]
    L = np.minimum(cc, us)
    u = L * (1.0 - sig * sig)
    su = np.sqrt(u)
    if r > 1e-8 * wr:
        m = (-(wr * wr) / (2.0 * r) * np.expm1(-4.0 * r * su / (wr * wr))
             * np.exp(-((su - r) / wr) ** 2))
    else:
        m = 2.0 * su * np.exp(-(su / wr) ** 2)
    jac = 2.0 * L * sig / np.sqrt((cc - L) + L * sig * sig + (cc <= 0.0))
    return (m * jac * wsig).sum(axis=-1)


def _xi_nodes(ha: float, us: float, xi_max: float, scale: float,
              density: float):
    """Panels for the squared-separation variable xi = dt^2 - dtau^2.
    The kernel core kinks exactly at xi = -ha and +ha, varies on `scale`
    across the source band [0, us], and decays like xi^{-3/2} beyond, so:
    aligned edges through the window, scale-spaced edges over the band,
    then geometric growth out to xi_max."""
    k = max(1, int(math.ceil(density)))
    edges = list(np.linspace(-ha, ha, 2 * k + 1))
    n_band = min(96 * k, max(12 * k, int(math.ceil((us + ha) / scale)) * k))
    edges += list(np.linspace(ha, us + ha, n_band + 1)[1:])
    while edges[-1] < xi_max:
        edges.append(min(edges[-1] * 1.7, xi_max) if edges[-1] > 0
                     else 2.0 * ha)
    edges = np.asarray(edges)
    xg, wg = gauss_legendre(8)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    xi = (mid[:, None] + h[:, None] * xg[None, :]).ravel()
    wxi = (h[:, None] * wg[None, :]).ravel()
    return xi, wxi


def _general_point(model: CurrentModel, t: float, r: float, tau: float,
                   kappa_s: float, ha: float, density: float) -> float:
    """One field point by quadrature over (xi, tau', sigma), where
    xi = dt^2 - dtau^2 carries the kernel core (whose sharp structure is
    then resolved once, on a grid shared by every tau' node) and the
    time integral rides along the two branches t' = t -+ sqrt(xi+dtau^2).
    Returns exactly 0.0 when the fifth-retardation gate excludes the
    entire source support."""
    da = 2.0 * ha
    q = model.amplitude
    wr = model.r_width
    # tau' range: below the field point (retardation), inside the window
    if model.tau_window is not None:
        u_c, u_w = model.tau_window
        u_lo, u_hi = u_c - 8.0 * u_w, min(u_c + 8.0 * u_w, tau)
    else:
        raise DomainError("general path requires a fifth-coordinate window")
    if model.kind == STATIC_GAUSSIAN:
        # kernel support needs dt^2 - dtau^2 + ha > 0: clamp the tau'
        # range by the causal reach so panels resolve the live sliver
        # even when the window is much wider than the light travel time
        dt_max = abs(t - model.t_center) + 8.0 * model.t_width
        u_lo = max(u_lo, tau - math.sqrt(dt_max * dt_max + ha))
    if u_hi <= u_lo:
        return 0.0   # causally unreachable: exact zero
    n = max(10, int(math.ceil(10 * density)))
    # refine the tau' panels toward the gate edge at tau' = tau, where the
    # time-branch jacobian can develop square-root structure
    u_edges = np.linspace(u_lo, u_hi, n + 1)
    if u_hi == tau:
        w_last = (u_hi - u_lo) / n
        u_edges = np.concatenate([u_edges[:-1],
                                  u_hi - w_last * np.array([0.5, 0.25, 0.1,
                                                            0.03, 0.0])])
    xg8, wg8 = gauss_legendre(8)
    uh = 0.5 * np.diff(u_edges)
    umid = 0.5 * (u_edges[:-1] + u_edges[1:])
    up = (umid[:, None] + uh[:, None] * xg8[None, :]).ravel()
    wu = (uh[:, None] * wg8[None, :]).ravel()

    sig, wsig = _sigma_nodes(density)
    us = (r + 8.0 * wr) ** 2
    if model.kind == STATIC_GAUSSIAN:
        xi_max = dt_max * dt_max
    else:
        xi_max = 2000.0 ** 2
    scale = max(wr * (r + wr), 2.0 * ha)
    xi, wxi = _xi_nodes(ha, us, xi_max, scale, density)

    core = (_shell_moment(xi - ha, r, wr, sig, wsig)
            - _shell_moment(xi + ha, r, wr, sig, wsig)) / (2.0 * _PI * da)

    dtau = tau - up
    gate = np.where(dtau > 0, 2.0, np.where(dtau == 0, 1.0, 0.0))
    u_prof = np.exp(-((up - u_c) / u_w) ** 2)
    arg = xi[:, None] + (dtau * dtau)[None, :]
    live = arg > 0.0
    root = np.sqrt(np.where(live, arg, 1.0))
    if model.kind == STATIC_GAUSSIAN:
        tw = model.t_width
        b_sum = (np.exp(-((t - root - model.t_center) / tw) ** 2)
                 + np.exp(-((t + root - model.t_center) / tw) ** 2))
    else:
        b_sum = 2.0
    tfac = np.where(live, b_sum / (2.0 * root), 0.0)
    total = np.einsum("i,j,ij->", core * wxi, gate * u_prof * wu, tfac)
    return -kappa_s * q * float(total)


def convolve_retarded(model: CurrentModel, grid: FieldGrid,
                      kappa: float = 1.0, kernel_scale: float = 1.0,
                      density: float = 1.0,
                      points: Optional[np.ndarray] = None) -> FieldResult:
    """Retarded-kernel field of `model` on `grid`.

    Fifth-uniform static sources take the fast analytic path (the full
    grid is a broadcast of one (t, r) sheet).  Windowed and worldline
    sources use the per-point general path; for those, pass `points`
    (an (n, 3) index array into the grid axes) or keep the grid small.
    kernel_scale multiplies the kernel normalization; density tightens
    all quadrature panels."""
    t_ax, r_ax, u_ax = grid.axes()
    dt, dr, du = grid.spacings()
    ha = 2.0 * min(dt, dr) ** 2
    kappa_s = kappa * kernel_scale
    flags: Tuple[str, ...] = ()
    if model.kind == STATIC_GAUSSIAN and model.tau_window is None:
        sheet = _static_field_2d(model, t_ax, r_ax, kappa_s, ha, density)
        values = np.repeat(sheet[:, :, None], u_ax.size, axis=2)
        if 8.0 * model.r_width > r_ax[-1]:
            flags = (DOMAIN_TRUNCATED,)
        return FieldResult(values=values, flags=flags)

    values = np.zeros((t_ax.size, r_ax.size, u_ax.size))
    if points is None:
        idx = np.indices(values.shape).reshape(3, -1).T
    else:
        idx = np.asarray(points, dtype=np.intp)
    for i, j, k in idx:
        values[i, j, k] = _general_point(
            model, float(t_ax[i]), float(r_ax[j]), float(u_ax[k]),
            kappa_s, ha, density)
    if points is not None:
        flags = flags + ("PARTIAL_GRID",)
    return FieldResult(values=values, flags=flags)


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------

def _apply_operator(a: np.ndarray, dt: float, dr: float, du: float,
                    r_ax: np.ndarray) -> np.ndarray:
    """(-d_tt + (1/r) d_rr(r .) + d_tautau) a on interior points, with the
    parity limit 6 (a_1 - a_0) / dr^2 on the axis."""
    la = np.full_like(a, np.nan)
    att = (a[2:, :, :] - 2.0 * a[1:-1, :, :] + a[:-2, :, :]) / dt ** 2
    auu = (a[:, :, 2:] - 2.0 * a[:, :, 1:-1] + a[:, :, :-2]) / du ** 2
    ra = a * r_ax[None, :, None]
    arr = np.empty_like(a)
    arr[:, 1:-1, :] = (ra[:, 2:, :] - 2.0 * ra[:, 1:-1, :]
                       + ra[:, :-2, :]) / dr ** 2 / r_ax[None, 1:-1, None]
    arr[:, 0, :] = 6.0 * (a[:, 1, :] - a[:, 0, :]) / dr ** 2
    la[1:-1, :-1, 1:-1] = (-att[:, :-1, 1:-1] + arr[1:-1, :-1, 1:-1]
                           + auu[1:-1, :-1, :])
    return la


def residual(a, grid: FieldGrid, model: CurrentModel,
             kappa: float = 1.0) -> ResidualResult:
    """How well the field solves (operator a) = -kappa j on the grid.

    rel_l2 and pointwise_max are residual norms relative to the source
    term; stencil_err_rel is a Richardson (h vs 2h) estimate of the
    stencil's own discretization error, and GRID_TOO_COARSE is flagged
    when the residual is not credibly above that floor."""
    a = np.asarray(a.values if isinstance(a, FieldResult) else a,
                   dtype=np.float64)
    t_ax, r_ax, u_ax = grid.axes()
    dt, dr, du = grid.spacings()
    j = model.density(t_ax[:, None, None], r_ax[None, :, None],
                      u_ax[None, None, :]) * np.ones_like(a)
    la = _apply_operator(a, dt, dr, du, r_ax)
    res = la + kappa * j
    keep = ~np.isnan(la)
    num = float(np.sqrt(np.mean(res[keep] ** 2)))
    den = float(np.sqrt(np.mean((kappa * j[keep]) ** 2)))
    rel_l2 = num / den if den > 0 else math.inf
    pmax = float(np.max(np.abs(res[keep]))) / float(
        np.max(np.abs(kappa * j[keep])))

    la2 = _apply_operator(a[::2, ::2, ::2], 2 * dt, 2 * dr, 2 * du,
                          r_ax[::2])
    common = la[::2, ::2, ::2]
    both = ~np.isnan(la2) & ~np.isnan(common)
    stencil = float(np.sqrt(np.mean((common[both] - la2[both]) ** 2))) / (
        3.0 * den) if den > 0 else math.inf
    flags: Tuple[str, ...] = ()
    if rel_l2 < 3.0 * stencil:
        flags = (GRID_TOO_COARSE,)
    return ResidualResult(rel_l2=rel_l2, pointwise_max=pmax,
                          stencil_err_rel=stencil, flags=flags)
