"""Acceptance gate: every contract of the library, one pass/fail line each.

Each verification suite runs once per module (they are the expensive,
cross-validating computations); the tests then assert the advertised
tolerances row by row.  Rows whose face-value tolerance the published
closed forms genuinely miss are asserted at face value here and FAIL
honestly; the *_reconciled_* rows pin the measured relationship that
explains each failure and must PASS.  See the reconciliation notes in
any oracle/pde verify report for the full story.
"""

import json
import os
import subprocess
import sys
import time

import pytest

from offshell_gf.report import RUNNERS, RunConfig, reconciliation_report

pytestmark = pytest.mark.acceptance


def _run(suite):
    t0 = time.perf_counter()
    rep = RUNNERS[suite](RunConfig(suite=suite))
    rep["_elapsed"] = time.perf_counter() - t0
    return rep


@pytest.fixture(scope="module")
def identities():
    return _run("identities")


@pytest.fixture(scope="module")
def routes():
    return _run("routes")


@pytest.fixture(scope="module")
def oracle():
    return _run("oracle")


@pytest.fixture(scope="module")
def pde():
    return _run("pde")


def row(rep, name):
    for r in rep["rows"]:
        if r["name"] == name:
            return r
    raise AssertionError(f"suite has no row named {name!r}")


def check(r):
    assert r["passed"], (
        f"{r['name']}: measured {r['measured']:.6g} vs tolerance "
        f"{r['tolerance']:.6g} -- {r['detail']}")


# --- radial weight integral identities (fast closed forms) -----------------

def test_pole_pair_sum_identity(identities):
    r = row(identities, "pole_pair_sum_inner")
    check(r)
    assert r["tolerance"] <= 1e-12


def test_pole_pair_antisymmetry(identities):
    check(row(identities, "pole_pair_antisymmetry"))


def test_pole_integral_quadrature_agreement(identities):
    check(row(identities, "pole_integral_quadrature"))


def test_identity_suite_runtime(identities):
    assert identities["_elapsed"] < 10.0


# --- oscillatory Bessel projection ------------------------------------------

@pytest.mark.parametrize("b", ["0.5", "1", "2", "5", "10"])
def test_bessel_projection(identities, b):
    r = row(identities, f"bessel_projection_b{b}")
    check(r)
    assert r["tolerance"] <= 1e-6


def test_bessel_projection_runtime(identities):
    assert identities["_elapsed"] < 30.0


# --- route reconciliation ----------------------------------------------------

def test_k5_route_equals_closed_form_inside(routes):
    r = row(routes, "k5_route_equals_canonical")
    check(r)
    assert r["tolerance"] <= 1e-12


def test_k5_route_exact_zero_outside(routes):
    check(row(routes, "k5_route_exact_zero_outside"))


def test_split_terms_cancel_outside(routes):
    check(row(routes, "split_terms_cancel_outside"))


def test_route_suite_runtime(routes):
    assert routes["_elapsed"] < 5.0


# --- published-form discrepancies -------------------------------------------

def test_oh_published_differs_widely(routes):
    # demonstration row: the published transcendental form disagrees with
    # the canonical one on >= 90% of interior points (flagged expected-fail)
    r = row(routes, "oh_published_differs")
    check(r)
    assert r["expected_fail"] is True


def test_published_minus_canonical_is_single_delta(oracle):
    r = row(oracle, "pv_difference_delta_fit_residual")
    check(r)
    assert r["tolerance"] <= 0.05


def test_delta_coefficient_reported_with_candidates(oracle):
    r = row(oracle, "pv_difference_delta_fit_residual")
    assert "candidates" in r["detail"]
    check(row(oracle, "pv_delta_coefficient_reconciled"))


# --- mass-superposition route (face-value tolerances) ------------------------

@pytest.mark.parametrize("name", [
    "interior_axis", "interior_offaxis", "mixed_shell",
    "spacelike", "cone4_straddle", "cone5_straddle",
])
def test_m_route_agrees_with_closed_form(oracle, name):
    # face-value agreement clause; the measured route converges to one
    # half of the closed-form pairing, so this fails honestly
    check(row(oracle, f"m_route_rewritten_{name}"))


def test_m_route_printed_minus_rewritten_is_delta(oracle):
    # face-value clause; the single-coefficient fit leaves a ~15% residual
    check(row(oracle, "m_route_printed_minus_rewritten_delta_fit"))


def test_m_route_half_ratio_pinned(oracle):
    check(row(oracle, "m_route_half_canonical_reconciled"))


# --- direct Fourier oracle (face-value tolerances) ---------------------------

@pytest.mark.parametrize("name", [
    "interior_axis", "interior_offaxis", "mixed_shell",
    "cone4_straddle", "cone5_straddle",
])
def test_fourier_agrees_with_closed_form(oracle, name):
    # face-value agreement clause; the oracle measures -1/2 times the
    # closed-form pairing, so this fails honestly
    check(row(oracle, f"fourier_vs_canonical_{name}"))


def test_fourier_spacelike_probe_is_null(oracle):
    check(row(oracle, "fourier_spacelike_null"))


def test_fourier_normalization_ratio_pinned(oracle):
    check(row(oracle, "fourier_normalization_reconciled"))


def test_normalization_decision_is_recorded(oracle):
    notes = reconciliation_report()["notes"]
    assert "normalization_decision" in notes
    assert "-1/2" in notes["normalization_decision"] or \
        "half" in notes["normalization_decision"]


def test_oracle_suite_runtime(oracle):
    assert oracle["_elapsed"] < 1800.0


# --- Green property of the retarded kernel -----------------------------------

def test_residual_small_at_printed_scale(pde):
    # face-value clause at the printed kernel normalization; the measured
    # residual is of order the source itself, so this fails honestly
    check(row(pde, "residual_rel_l2_64cubed_unit_scale"))


def test_residual_shrinks_under_refinement_at_printed_scale(pde):
    # face-value clause; the factor is near 1 at the printed normalization
    check(row(pde, "residual_refinement_unit_scale"))


def test_residual_small_at_half_scale(pde):
    check(row(pde, "residual_rel_l2_64cubed_half_scale_reconciled"))


def test_residual_shrinks_under_refinement_at_half_scale(pde):
    r = row(pde, "residual_refinement_half_scale_reconciled")
    check(r)
    assert r["measured"] >= 3.0


def test_field_is_exactly_zero_below_source_support(pde):
    check(row(pde, "windowed_zeros_below_support"))
    check(row(pde, "windowed_nonzero_above_support"))


def test_pde_suite_runtime(pde):
    assert pde["_elapsed"] < 600.0


# --- determinism of the verification CLI -------------------------------------

def test_verify_reports_byte_identical_across_threads(tmp_path):
    def run(out, threads):
        env = dict(os.environ)
        env["OFFSHELL_GF_THREADS"] = threads
        return subprocess.run(
            [sys.executable, "-m", "offshell_gf.cli", "verify",
             "--suite", "routes", "--out", str(out)],
            capture_output=True, text=True, cwd=tmp_path, env=env)

    a, b = tmp_path / "a.json", tmp_path / "b.json"
    ra = run(a, "1")
    rb = run(b, "4")
    assert ra.returncode == 0, ra.stdout + ra.stderr
    assert rb.returncode == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["config_sha256"] == json.loads(b.read_text())["config_sha256"]
