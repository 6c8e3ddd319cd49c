"""Source models, field convolution paths, and their flags."""

import numpy as np
import pytest

from offshell_gf import (
    STATIC_GAUSSIAN,
    UNIFORM_WORLDLINE,
    CurrentModel,
    DomainError,
    FieldGrid,
    convolve_retarded,
)
from offshell_gf.fields import _general_point

# smeared charge at rest, fifth-coordinate window (0, 0.3), half-strength
# kernel, mollification matched to a 64-per-axis default grid
PIN_WORLDLINE = 1.179765827285543e-03
HA_64 = 2.0 * (4.0 / 63.0) ** 2


def test_current_model_validation():
    with pytest.raises(DomainError):
        CurrentModel(kind="bogus")
    with pytest.raises(DomainError):
        CurrentModel(r_width=-0.1)
    with pytest.raises(DomainError):
        CurrentModel(kind=UNIFORM_WORLDLINE)          # window required
    with pytest.raises(DomainError):
        CurrentModel(tau_window=(0.0, -1.0))


def test_field_grid_validation():
    with pytest.raises(DomainError):
        FieldGrid(4, 16, 16)
    with pytest.raises(DomainError):
        FieldGrid(16, 16, 16, r_span=(0.5, 4.0))
    g = FieldGrid(16, 16, 16)
    t_ax, r_ax, u_ax = g.axes()
    assert t_ax.size == 16 and r_ax[0] == 0.0
    dt, dr, du = g.spacings()
    assert dt == pytest.approx(4.0 / 15.0)


def test_worldline_point_pinned():
    wm = CurrentModel(kind=UNIFORM_WORLDLINE, tau_window=(0.0, 0.3))
    v = _general_point(wm, 0.0, 1.0, 1.0, 0.5, HA_64, 1.0)
    assert v == pytest.approx(PIN_WORLDLINE, rel=1e-12)


def test_worldline_field_is_time_independent():
    wm = CurrentModel(kind=UNIFORM_WORLDLINE, tau_window=(0.0, 0.3))
    v0 = _general_point(wm, 0.0, 1.0, 1.0, 0.5, HA_64, 1.0)
    v1 = _general_point(wm, 0.7, 1.0, 1.0, 0.5, HA_64, 1.0)
    v2 = _general_point(wm, -1.3, 1.0, 1.0, 0.5, HA_64, 1.0)
    assert v0 == v1 == v2


def test_windowed_field_vanishes_below_window():
    # fifth-coordinate retardation: no source sits below tau = 0.2, so the
    # field there is exactly zero (not merely small)
    wm = CurrentModel(tau_window=(1.0, 0.1))
    assert _general_point(wm, 0.5, 1.0, 0.0, 1.0, HA_64, 1.0) == 0.0
    assert _general_point(wm, 0.5, 1.0, 0.19, 1.0, HA_64, 1.0) == 0.0
    assert _general_point(wm, 0.5, 1.0, 1.5, 1.0, HA_64, 1.0) != 0.0


def test_wide_window_approaches_uniform_static_path():
    # the general (windowed) path and the fast fifth-uniform sheet path are
    # independent quadratures of the same mollified field
    g = FieldGrid(9, 9, 9)
    static = convolve_retarded(CurrentModel(), g, kernel_scale=0.5)
    win = convolve_retarded(CurrentModel(tau_window=(0.0, 200.0)), g,
                            kernel_scale=0.5, points=np.array([[5, 2, 4]]))
    sv = float(static.values[5, 2, 4])
    wv = float(win.values[5, 2, 4])
    assert wv == pytest.approx(sv, rel=5e-3)
    assert "PARTIAL_GRID" in win.flags
    assert static.flags == ()


def test_uniform_static_sheet_is_tau_independent():
    g = FieldGrid(10, 10, 10)
    out = convolve_retarded(CurrentModel(), g)
    assert np.all(out.values[:, :, :1] == out.values)
    assert np.all(np.isfinite(out.values))


def test_domain_truncation_flag():
    g = FieldGrid(10, 10, 10)
    out = convolve_retarded(CurrentModel(r_width=0.6), g,
                            points=np.array([[1, 1, 1]]))
    assert "DOMAIN_TRUNCATED" in out.flags


def test_field_result_array_protocol():
    g = FieldGrid(9, 9, 9)
    out = convolve_retarded(CurrentModel(), g)
    arr = np.asarray(out)
    assert arr.shape == (9, 9, 9)
