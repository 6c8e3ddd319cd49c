"""Verification suites and the reconciliation report.

Each suite runs a set of quantitative checks and returns a plain dict
that serializes to canonical JSON (sorted keys, no timestamps, floats
via repr) so repeated runs are byte-identical under any thread count.

Rows marked expected_fail pass when the checked form fails by at least
the documented margin (that failure is the finding being verified).
Rows named *_reconciled_* pin the measured resolution of a printed
discrepancy; rows without that marker state the checks at face value
and are left red where the face-value claim does not hold.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .core import Event5, QuadSpec, Region5, classify
from .distributions import (GAUSSIAN, TestFunction, pair_canonical,
                            pair_lightcone_delta, pair_lh_published)
from .fields import CurrentModel, FieldGrid, convolve_retarded, residual
from .greens import (I_closed, I_quadrature, eval_canonical, eval_g1_g2,
                     eval_k5_route, eval_oh_published)
from .kgroute import KGForm, bessel_identity_integral, pair_m_integration
from .oracle import fourier_pairing

_INV4PI = 1.0 / (4.0 * math.pi)


@dataclass(frozen=True)
class RunConfig:
    """Everything a verification run depends on; hashable to a config id.

    A run is reproducible from this alone: the RNG seed, tolerances and
    grid sizes are all explicit."""
    suite: str = "identities"
    seed: int = 20260817
    tol: float = 1e-3
    max_evals: int = 80_000_000
    grid_n: int = 64
    density: float = 1.0
    fast: bool = False

    def quad_spec(self) -> QuadSpec:
        spec = QuadSpec(tol=self.tol, max_evals=self.max_evals)
        return spec.fast() if self.fast else spec


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, repr floats, no whitespace
    drift, no timestamps anywhere."""
    def default(o):
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"not serializable: {type(o)!r}")
    return json.dumps(obj, sort_keys=True, default=default,
                      separators=(",", ":"))


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(canonical_json(asdict(cfg)).encode()).hexdigest()


def _row(name: str, measured: float, tolerance: float, passed: bool,
         detail: str = "", expected_fail: bool = False) -> dict:
    return {"name": name, "measured": float(measured),
            "tolerance": float(tolerance), "passed": bool(passed),
            "expected_fail": bool(expected_fail), "detail": detail}


def acceptance_suite() -> Tuple[Tuple[str, TestFunction], ...]:
    """Six Gaussian test functions spanning every region class: two well
    inside the 5D cone, one in the mixed shell, one purely spacelike,
    and two straddling a cone."""
    return (
        ("interior_axis", TestFunction(GAUSSIAN, (3.0, 0.0, 0.0), 0.5)),
        ("interior_offaxis", TestFunction(GAUSSIAN, (-2.5, 0.0, 1.0), 0.4)),
        ("mixed_shell", TestFunction(GAUSSIAN, (2.0, 1.0, 2.2), 0.4)),
        ("spacelike", TestFunction(GAUSSIAN, (0.5, 3.0, 0.0), 0.4)),
        ("cone4_straddle", TestFunction(GAUSSIAN, (1.5, 1.5, 0.0), 0.4)),
        ("cone5_straddle", TestFunction(GAUSSIAN, (2.0, 1.0, math.sqrt(3.0)),
                                        0.35)),
    )


# ---------------------------------------------------------------------------
# identities suite
# ---------------------------------------------------------------------------

def _log_pairs(n: int, inner: bool, seed: int):
    """Deterministic log-spaced (a, b) pairs with a^2 > b^2 (inner) or
    b^2 > a^2 (outer)."""
    rng = np.random.default_rng(seed)
    a = np.exp(rng.uniform(np.log(0.1), np.log(50.0), n))
    frac = rng.uniform(0.05, 0.95, n)
    sign = np.where(rng.uniform(0, 1, n) < 0.5, -1.0, 1.0)
    b = sign * a * frac if inner else sign * a / frac
    return a, b


def _j0(x: float) -> float:
    from .backend import kernels
    v, _ = kernels.j0j1_batch(np.array([x]))
    return float(v[0])


def run_identities(cfg: RunConfig) -> dict:
    rows = []
    a, b = _log_pairs(50, True, cfg.seed)
    worst = 0.0
    for ai, bi in zip(a, b):
        ref = math.pi / math.sqrt(ai * ai - bi * bi)
        got = I_closed(ai, bi) + I_closed(ai, -bi)
        worst = max(worst, abs(got - ref) / ref)
    rows.append(_row("pole_pair_sum_inner", worst, 1e-12, worst <= 1e-12,
                     "I(a,b)+I(a,-b) vs pi/sqrt(a^2-b^2), 50 log-spaced "
                     "pairs with a^2 > b^2"))

    a, b = _log_pairs(50, False, cfg.seed + 1)
    worst = 0.0
    for ai, bi in zip(a, b):
        got = I_closed(ai, bi) + I_closed(ai, -bi)
        worst = max(worst, abs(got) / abs(I_closed(ai, bi)))
    rows.append(_row("pole_pair_antisymmetry", worst, 1e-12, worst <= 1e-12,
                     "I(a,b)+I(a,-b) vs 0, 50 pairs with b^2 > a^2"))

    a, b = _log_pairs(12, True, cfg.seed + 2)
    a2, b2 = _log_pairs(12, False, cfg.seed + 3)
    worst = 0.0
    for ai, bi in zip(np.r_[a, a2], np.r_[b, b2]):
        ref = I_closed(ai, bi)
        got, err = I_quadrature(ai, bi)
        dev = abs(got - ref)
        if dev > max(1e-8, err):
            worst = max(worst, dev / abs(ref))
    rows.append(_row("pole_integral_quadrature", worst, 0.0, worst == 0.0,
                     "I_quadrature vs closed form within max(1e-8, "
                     "reported error), 24 pairs over both branches"))

    for b_arg in (0.5, 1.0, 2.0, 5.0, 10.0):
        ref = 0.5 * math.pi * _j0(b_arg)
        val, _err = bessel_identity_integral(b_arg)
        dev = abs(val - ref)
        rows.append(_row(f"bessel_projection_b{b_arg:g}", dev, 1e-6,
                         dev <= 1e-6,
                         "damped oscillatory integral, extrapolated, vs "
                         "half-pi J0"))
    return _suite_report("identities", cfg, rows)


# ---------------------------------------------------------------------------
# routes suite
# ---------------------------------------------------------------------------

def _sample_region(rng, region: Region5, n: int):
    """Rejection-sample events classified into `region`."""
    out = []
    while len(out) < n:
        t = rng.uniform(-4, 4, 4 * n)
        r = rng.uniform(0, 4, 4 * n)
        tau = rng.uniform(-4, 4, 4 * n)
        for ti, ri, ui in zip(t, r, tau):
            e = Event5(float(ti), float(ri), float(ui))
            if classify(e) is region:
                out.append(e)
                if len(out) == n:
                    break
    return out


def run_routes(cfg: RunConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    rows = []

    pts = _sample_region(rng, Region5.TIMELIKE5, 1000)
    worst = 0.0
    for e in pts:
        ref = eval_canonical(e)
        worst = max(worst, abs(eval_k5_route(e) - ref) / abs(ref))
    rows.append(_row("k5_route_equals_canonical", worst, 1e-12,
                     worst <= 1e-12, "1000 interior points, relative"))

    n_bad = 0
    n_checked = 0
    for region in (Region5.SPACELIKE4, Region5.MIXED):
        for e in _sample_region(rng, region, 500):
            n_checked += 1
            if eval_k5_route(e) != 0.0:
                n_bad += 1
    rows.append(_row("k5_route_exact_zero_outside", n_bad, 0.0, n_bad == 0,
                     f"{n_checked} exterior points, exact comparison"))

    worst = 0.0
    n_checked = 0
    for e in _sample_region(rng, Region5.SPACELIKE4, 500):
        if abs(e.tau) < 1e-3:
            continue
        n_checked += 1
        g1, g2 = eval_g1_g2(e)
        worst = max(worst, abs(g1 + g2) / abs(g1))
    rows.append(_row("split_terms_cancel_outside", worst, 1e-12,
                     worst <= 1e-12,
                     f"g1 = -g2 at {n_checked} spacelike points"))

    pts = _sample_region(rng, Region5.TIMELIKE5, 500)
    n_diff = 0
    for e in pts:
        ref = eval_canonical(e)
        if abs(eval_oh_published(e) - ref) > 0.10 * abs(ref):
            n_diff += 1
    frac = n_diff / len(pts)
    rows.append(_row("oh_published_differs", frac, 0.90, frac >= 0.90,
                     "two-branch published closed form deviates > 10% "
                     "relative on interior points (the documented "
                     "discrepancy)", expected_fail=True))
    return _suite_report("routes", cfg, rows)


# ---------------------------------------------------------------------------
# oracle suite (pairing-level cross-validation)
# ---------------------------------------------------------------------------

def _fit_delta_coefficient(diffs, deltas):
    """Least-squares single-coefficient fit diffs ~ c * deltas, plus the
    relative residual of the fit."""
    d = np.asarray(diffs)
    z = np.asarray(deltas)
    c = float(z @ d / (z @ z))
    res = float(np.linalg.norm(d - c * z) / max(1e-300, np.linalg.norm(d)))
    return c, res


def run_oracle(cfg: RunConfig) -> dict:
    spec = cfg.quad_spec()
    suite = acceptance_suite()
    rows = []
    canon = {name: pair_canonical(phi) for name, phi in suite}
    delta = {name: pair_lightcone_delta(phi) for name, phi in suite}

    # -- published principal-value pairing vs canonical: one-delta fit --
    diffs = [pair_lh_published(phi).value - canon[name].value
             for name, phi in suite]
    zs = [delta[name].value for name, _ in suite]
    c_fit, res_fit = _fit_delta_coefficient(diffs, zs)
    rows.append(_row("pv_difference_delta_fit_residual", res_fit, 0.05,
                     res_fit <= 0.05,
                     f"fitted lightcone-delta coefficient {c_fit:+.6e}; "
                     f"printed candidates {+_INV4PI:+.6e} and "
                     f"{-_INV4PI:+.6e}"))
    rows.append(_row("pv_delta_coefficient_reconciled",
                     abs(c_fit + _INV4PI), 1e-4,
                     abs(c_fit + _INV4PI) <= 1e-4,
                     "the fit lands on the negative candidate"))

    # -- mass-superposition route --
    ratios = []
    m_diffs = []
    for name, phi in suite:
        got = pair_m_integration(phi, KGForm.REWRITTEN, spec)
        ref = canon[name]
        tol = max(1e-2 * abs(ref.value), got.abs_err + ref.abs_err)
        dev = abs(got.value - ref.value)
        ratio = got.value / ref.value if ref.value != 0.0 else math.nan
        rows.append(_row(f"m_route_rewritten_{name}", dev, tol, dev <= tol,
                         f"value {got.value:+.6e} vs canonical "
                         f"{ref.value:+.6e} (ratio {ratio:+.5f})"))
        if name != "spacelike":
            ratios.append(ratio)
        printed = pair_m_integration(phi, KGForm.PRINTED, spec)
        m_diffs.append(printed.value - got.value)
    dev_half = max(abs(x - 0.5) for x in ratios)
    rows.append(_row("m_route_half_canonical_reconciled", dev_half, 5e-3,
                     dev_half <= 5e-3,
                     "rewritten-form route / canonical is +0.5 on every "
                     "non-null suite member"))
    c_m, res_m = _fit_delta_coefficient(m_diffs, zs)
    rows.append(_row("m_route_printed_minus_rewritten_delta_fit", res_m,
                     0.05, res_m <= 0.05,
                     f"fitted coefficient {c_m:+.6e}, fit residual "
                     f"{res_m:.3f}; a residual well above tolerance means "
                     "the printed and rewritten integrands differ by more "
                     "than a lightcone delta"))

    # -- momentum-space brute force --
    four = {name: fourier_pairing(phi, spec) for name, phi in suite}
    ratios = []
    for name, phi in suite:
        ref, got = canon[name], four[name]
        if name == "spacelike":
            dev = abs(got.value)
            rows.append(_row("fourier_spacelike_null", dev, cfg.tol,
                             dev <= cfg.tol, f"measured {got.value:+.3e}"))
            continue
        norm = abs(ref.value)
        dev = abs(got.value - ref.value) / norm
        tol = max(2e-3, (got.abs_err + ref.abs_err) / norm)
        ratio = got.value / ref.value
        ratios.append(ratio)
        rows.append(_row(f"fourier_vs_canonical_{name}", dev, tol,
                         dev <= tol,
                         f"fourier {got.value:+.6e} vs canonical "
                         f"{ref.value:+.6e} (ratio {ratio:+.6f}); "
                         "normalized by |<canonical, phi>|"))
    dev_mhalf = max(abs(x + 0.5) for x in ratios)
    rows.append(_row("fourier_normalization_reconciled", dev_mhalf, 1e-3,
                     dev_mhalf <= 1e-3,
                     "momentum-space pairing / canonical is -0.5 on every "
                     "non-null suite member: the oracle supports half the "
                     "canonical magnitude, with the opposite overall sign "
                     "for the verbatim transform"))
    return _suite_report("oracle", cfg, rows)


# ---------------------------------------------------------------------------
# pde suite (Green property of the retarded kernel)
# ---------------------------------------------------------------------------

def run_pde(cfg: RunConfig) -> dict:
    rows = []
    model = CurrentModel()
    n = cfg.grid_n
    grid = FieldGrid(n, n, n)

    f1 = convolve_retarded(model, grid, kernel_scale=1.0,
                           density=cfg.density)
    r1 = residual(f1, grid, model)
    rows.append(_row(f"residual_rel_l2_{n}cubed_unit_scale", r1.rel_l2,
                     0.05, r1.rel_l2 <= 0.05,
                     "retarded kernel at printed normalization; stencil "
                     f"floor {r1.stencil_err_rel:.4f}; "
                     f"flags {sorted(r1.flags)}"))

    fh = convolve_retarded(model, grid, kernel_scale=0.5,
                           density=cfg.density)
    rh = residual(fh, grid, model)
    rows.append(_row(f"residual_rel_l2_{n}cubed_half_scale_reconciled",
                     rh.rel_l2, 0.05, rh.rel_l2 <= 0.05,
                     "same convolution at half the printed normalization "
                     "reaches the finite-difference floor "
                     f"(stencil estimate {rh.stencil_err_rel:.4f})"))

    n2 = 2 * n
    grid2 = FieldGrid(n2, n2, n2)
    f1b = convolve_retarded(model, grid2, kernel_scale=1.0,
                            density=2.0 * cfg.density)
    r1b = residual(f1b, grid2, model)
    factor1 = r1.rel_l2 / max(1e-300, r1b.rel_l2)
    rows.append(_row("residual_refinement_unit_scale", factor1,
                     3.0, factor1 >= 3.0,
                     f"{n}^3 -> {n2}^3 at printed normalization: "
                     f"{r1.rel_l2:.5f} -> {r1b.rel_l2:.5f}; a factor near 1 "
                     "means the residual is a normalization mismatch, not "
                     "discretization error"))

    f2 = convolve_retarded(model, grid2, kernel_scale=0.5,
                           density=2.0 * cfg.density)
    r2 = residual(f2, grid2, model)
    factor = rh.rel_l2 / max(1e-300, r2.rel_l2)
    rows.append(_row("residual_refinement_half_scale_reconciled", factor,
                     3.0, factor >= 3.0,
                     f"{n}^3 -> {n2}^3 with doubled quadrature density: "
                     f"{rh.rel_l2:.5f} -> {r2.rel_l2:.5f}"))

    # windowed source: the field vanishes identically below the window
    wm = CurrentModel(tau_window=(1.0, 0.1))
    m = max(8, n // 4)
    wgrid = FieldGrid(m, m, m)
    t_ax, r_ax, u_ax = wgrid.axes()
    k_below = np.nonzero(u_ax < 1.0 - 0.8)[0]
    pts = np.array([(i, j, k) for i in range(t_ax.size)
                    for j in range(r_ax.size) for k in k_below])
    fz = convolve_retarded(wm, wgrid, kernel_scale=0.5, points=pts)
    planes = np.asarray(fz)[:, :, k_below]
    n_nonzero = int(np.count_nonzero(planes))
    rows.append(_row("windowed_zeros_below_support", n_nonzero, 0.0,
                     n_nonzero == 0,
                     f"{planes.size} grid points strictly below the "
                     "window in the fifth coordinate, exact zeros"))
    probe = convolve_retarded(
        wm, wgrid, kernel_scale=0.5,
        points=np.array([[t_ax.size // 2, 2, u_ax.size - 2]]))
    alive = float(np.abs(np.asarray(probe)).max())
    rows.append(_row("windowed_nonzero_above_support", alive, 0.0,
                     alive != 0.0,
                     "engine sanity: a point late in the window is "
                     "genuinely nonzero"))
    return _suite_report("pde", cfg, rows)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def _suite_report(suite: str, cfg: RunConfig, rows) -> dict:
    from . import __version__
    return {"suite": suite, "version": __version__,
            "config": asdict(cfg), "config_sha256": config_hash(cfg),
            "rows": rows, "all_pass": all(r["passed"] for r in rows)}


RUNNERS = {"identities": run_identities, "routes": run_routes,
           "oracle": run_oracle, "pde": run_pde}


def reconciliation_report(cfg: Optional[RunConfig] = None) -> dict:
    """Condensed adjudication of the printed discrepancies; the oracle
    and pde suites carry the measurements backing every sentence."""
    notes = {
        "normalization_decision": (
            "The brute-force momentum-space pairing of the verbatim "
            "even propagator (principal-value poles) measures -0.5 "
            "times the canonical pairing on every non-null suite "
            "member, to quadrature precision.  The magnitude therefore "
            "supports the quarter-inverse-pi-squared coefficient on the "
            "radial-derivative form -- half the canonical "
            "normalization -- and the verbatim transform carries the "
            "opposite overall sign (it solves the wave equation with a "
            "negative unit source).  The canonical interior form is "
            "twice the fundamental solution."),
        "pde_meter": (
            "Convolving the retarded kernel at printed scale against a "
            "smooth source leaves a wave-operator residual of order "
            "the source itself (relative l2 about 0.91), and grid "
            "refinement does not shrink it (factor near 1): the residual "
            "is a normalization mismatch, not discretization error.  At "
            "half scale the residual drops to the finite-difference floor "
            "(about 0.046 at 64^3) and refining the grid shrinks it by "
            "more than 3x.  The Green property holds for half the "
            "printed normalization."),
        "mass_route": (
            "The mass-superposition route with the delta-free rewritten "
            "integrand converges to +0.5 times the canonical pairing "
            "on all six suite members; the printed integrand differs "
            "from the rewritten one by more than a lightcone delta "
            "(single-coefficient fit residual about 0.15, three times "
            "the acceptance threshold), so the printed per-mass form "
            "and the rewritten one are inequivalent in their smooth "
            "parts as well."),
        "split_route": (
            "The two-piece fifth-momentum route reproduces the "
            "canonical form identically in the interior and cancels "
            "exactly outside; the separately-published two-branch "
            "closed form disagrees with the canonical form by more "
            "than 10% on essentially all interior points, which the "
            "routes suite demonstrates as an expected failure."),
        "pv_delta_coefficient": (
            "The difference between the principal-value published "
            "pairing and the canonical one is fit by a single "
            "lightcone-delta term with coefficient -1/(4 pi); the fit "
            "selects the negative sign between the two printed "
            "candidates."),
        "fourier_normalizer": (
            "Relative agreement for the momentum oracle is normalized "
            "by |<canonical, phi>| per suite member; the spacelike "
            "member is covered by the absolute null clause instead, "
            "since its canonical pairing is compatible with zero."),
    }
    out = {"notes": notes}
    if cfg is not None:
        out["config_sha256"] = config_hash(cfg)
    return out
