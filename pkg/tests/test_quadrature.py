"""Adaptive quadrature, extrapolation, and singularity probing utilities."""

import math

import numpy as np
import pytest

from offshell_gf.core import BudgetExceededError
from offshell_gf.quadrature import (
    adaptive_1d,
    adaptive_rect,
    fixed_gl,
    gauss_legendre,
    neville_extrapolate,
    probe_singularity_exponent,
)


def test_adaptive_1d_sin():
    val, err, used = adaptive_1d(np.sin, 0.0, math.pi)
    assert val == pytest.approx(2.0, abs=1e-12)
    assert err < 1e-9
    assert used > 0


def test_adaptive_1d_breakpoints_help_kinks():
    f = lambda x: np.abs(x - 1.0 / 3.0)
    exact = (1.0 / 3.0) ** 2 / 2 + (2.0 / 3.0) ** 2 / 2
    val, err, _ = adaptive_1d(f, 0.0, 1.0, breakpoints=(1.0 / 3.0,))
    assert val == pytest.approx(exact, abs=1e-12)


def test_adaptive_1d_budget_exhaustion():
    # rapidly oscillating integrand with an absurdly small budget
    f = lambda x: np.sin(400.0 * x) / (1e-4 + x * x)
    with pytest.raises(BudgetExceededError):
        adaptive_1d(f, 0.0, 10.0, tol_abs=1e-14, budget=64)


def test_gauss_legendre_polynomial_exactness():
    x, w = gauss_legendre(8)
    # odd powers integrate to zero by symmetry of the rule
    assert abs(np.sum(w * x**7)) < 1e-15
    # an 8-point rule is exact through degree 15
    assert np.sum(w * x**14) == pytest.approx(2.0 / 15.0, rel=1e-14)


def test_fixed_gl_matches_adaptive():
    f = lambda x: np.exp(-x) * np.cos(3.0 * x)
    ref, _, _ = adaptive_1d(f, 0.0, 5.0, tol_abs=1e-13)
    assert fixed_gl(f, 0.0, 5.0, 200) == pytest.approx(ref, rel=1e-12)


def test_adaptive_rect_separable():
    f2 = lambda x, y: x * y
    val, err, _ = adaptive_rect(f2, 0.0, 1.0, 0.0, 1.0, tol_abs=1e-12)
    assert val == pytest.approx(0.25, abs=1e-10)


def test_neville_extrapolate_quadratic():
    eps = np.array([0.4, 0.2, 0.1, 0.05])
    ys = 1.0 + 3.0 * eps**2
    lim, err = neville_extrapolate(eps, ys)
    assert lim == pytest.approx(1.0, abs=1e-10)
    assert err < 1e-6


def test_probe_singularity_exponent_power_law():
    f = lambda s: s ** (-1.5)
    slope = probe_singularity_exponent(f, 0.0, 1e-2)
    assert slope == pytest.approx(-1.5, abs=0.02)

    g = lambda s: 2.0 + 0.0 * s
    slope = probe_singularity_exponent(g, 0.0, 1e-2)
    assert slope == pytest.approx(0.0, abs=0.05)


def test_probe_singularity_exponent_two_sided():
    f = lambda s: np.abs(s - 2.0) ** (-0.5)
    left = probe_singularity_exponent(f, 2.0, 0.1, side=-1)
    right = probe_singularity_exponent(f, 2.0, 0.1, side=+1)
    assert left == pytest.approx(-0.5, abs=0.02)
    assert right == pytest.approx(-0.5, abs=0.02)
