"""Bessel J0/J1 kernels against an arbitrary-precision reference."""

import numpy as np
import pytest

mpmath = pytest.importorskip("mpmath")

from offshell_gf.bessel import j0j1


def test_values_at_zero():
    j0, j1 = j0j1(np.array([0.0]))
    assert j0[0] == 1.0
    assert j1[0] == 0.0


def test_against_mpmath_grid():
    xs = np.concatenate([
        np.linspace(0.0, 12.0, 241),
        np.geomspace(12.0, 600.0, 120),
    ])
    j0, j1 = j0j1(xs)
    ref0 = np.array([float(mpmath.besselj(0, x)) for x in xs])
    ref1 = np.array([float(mpmath.besselj(1, x)) for x in xs])
    assert np.max(np.abs(j0 - ref0)) < 3e-13
    assert np.max(np.abs(j1 - ref1)) < 3e-13


def test_negative_argument_parity():
    xs = np.linspace(0.1, 30.0, 57)
    j0p, j1p = j0j1(xs)
    j0m, j1m = j0j1(-xs)
    np.testing.assert_array_equal(j0m, j0p)
    np.testing.assert_array_equal(j1m, -j1p)


def test_derivative_recurrences():
    # centered differences against J0' = -J1 and J1' = J0 - J1/x
    xs = np.linspace(0.5, 40.0, 80)
    h = 1e-5
    j0, j1 = j0j1(xs)
    j0p = (j0j1(xs + h)[0] - j0j1(xs - h)[0]) / (2 * h)
    j1p = (j0j1(xs + h)[1] - j0j1(xs - h)[1]) / (2 * h)
    assert np.max(np.abs(j0p + j1)) < 5e-8
    assert np.max(np.abs(j1p - (j0 - j1 / xs))) < 5e-8
