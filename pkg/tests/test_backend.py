"""Parity between the pure-python and compiled kernel backends."""

import subprocess
import sys

import numpy as np
import pytest

from offshell_gf import _kernels_py as pyk

ck = pytest.importorskip(
    "offshell_gf._kernels", reason="compiled extension not built")

EPS = 1e-9


def _sample(n=20000, seed=3):
    rng = np.random.default_rng(seed)
    t = rng.uniform(-4.0, 4.0, n)
    r = rng.uniform(0.0, 4.0, n)
    tau = rng.uniform(-4.0, 4.0, n)
    # sprinkle exact cone points and axis points into the batch
    t[:50] = r[:50]
    tau[:50] = 0.0
    tau[50:100] = np.sqrt(np.maximum(t[50:100] ** 2 - r[50:100] ** 2, 0.0))
    r[100:130] = 0.0
    return t, r, tau


def _assert_matched(a, b, rtol=0.0, atol=0.0):
    a = np.asarray(a)
    b = np.asarray(b)
    bad_a = ~np.isfinite(a)
    bad_b = ~np.isfinite(b)
    np.testing.assert_array_equal(bad_a, bad_b)
    if rtol == 0.0 and atol == 0.0:
        np.testing.assert_array_equal(a[~bad_a], b[~bad_b])
    else:
        np.testing.assert_allclose(a[~bad_a], b[~bad_b], rtol=rtol, atol=atol)
    # non-finite entries must agree in kind (nan vs inf sign)
    np.testing.assert_array_equal(np.isnan(a[bad_a]), np.isnan(b[bad_b]))


def test_region_codes_identical():
    t, r, tau = _sample()
    np.testing.assert_array_equal(
        pyk.region_code_batch(t, r, tau, EPS), ck.region_code_batch(t, r, tau, EPS))


def test_closed_forms_match_to_ulp():
    # numpy's vectorized pow and libm's pow may differ in the last ulp;
    # anything beyond a few ulp would indicate a diverging formula
    t, r, tau = _sample()
    _assert_matched(pyk.canonical_batch(t, r, tau), ck.canonical_batch(t, r, tau),
                    rtol=5e-16)
    _assert_matched(pyk.retarded_batch(t, r, tau), ck.retarded_batch(t, r, tau),
                    rtol=5e-16)
    _assert_matched(pyk.principal_o41_batch(t, r, tau),
                    ck.principal_o41_batch(t, r, tau), rtol=5e-16)
    _assert_matched(pyk.principal_o32_batch(t, r, tau),
                    ck.principal_o32_batch(t, r, tau), rtol=5e-16)
    _assert_matched(pyk.k5_route_batch(t, r, tau), ck.k5_route_batch(t, r, tau),
                    rtol=5e-16)


def test_bessel_shared_identical():
    x = np.linspace(0.0, 80.0, 4001)
    p0, p1 = pyk.j0j1_batch(x)
    c0, c1 = ck.j0j1_batch(x)
    np.testing.assert_array_equal(p0, c0)
    np.testing.assert_array_equal(p1, c1)


def test_transcendental_forms_close():
    t, r, tau = _sample()
    with np.errstate(divide="ignore", invalid="ignore"):
        _assert_matched(pyk.oh_published_batch(t, r, tau),
                        ck.oh_published_batch(t, r, tau), rtol=1e-12)
        pg1, pg2 = pyk.g1g2_batch(t, r, tau)
        cg1, cg2 = ck.g1g2_batch(t, r, tau)
    _assert_matched(pg1, cg1, rtol=1e-12)
    _assert_matched(pg2, cg2, rtol=1e-12)


def test_static_profile_close():
    rng = np.random.default_rng(11)
    rp = rng.uniform(0.0, 2.0, 3000)
    t = rng.uniform(-2.0, 2.0, 3000)
    r = rng.uniform(0.05, 4.0, 3000)
    ha = 2.0 * (4.0 / 63.0) ** 2
    p = pyk.static_profile_batch(rp, t, r, 0.0, 0.35, ha)
    c = ck.static_profile_batch(rp, t, r, 0.0, 0.35, ha)
    scale = np.max(np.abs(p))
    _assert_matched(p, c, rtol=1e-9, atol=1e-9 * scale)
    po = pyk.static_profile_origin_batch(rp[:200], t[:200], 0.0, 0.35, ha)
    co = ck.static_profile_origin_batch(rp[:200], t[:200], 0.0, 0.35, ha)
    _assert_matched(po, co, rtol=1e-9, atol=1e-9 * np.max(np.abs(po)))


def _backend_of(env_value):
    code = ("import offshell_gf as o; print(o.BACKEND)")
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True,
        env={"PATH": "/usr/bin:/bin", "OFFSHELL_GF_BACKEND": env_value},
    )
    assert out.returncode == 0, out.stderr
    return out.stdout.strip()


def test_backend_selection_env():
    assert _backend_of("py") == "python"
    assert _backend_of("compiled") == "compiled"
    assert _backend_of("auto") == "compiled"
