"""Massive 4D kernel forms and the mass-superposition route."""

import math

import numpy as np
import pytest

from offshell_gf import (
    DomainError,
    KGForm,
    OnSingularSupportError,
    QuadSpec,
    bessel_identity_integral,
    eval_kg,
    pair_canonical,
    pair_m_integration,
)
from offshell_gf.bessel import j0j1
from offshell_gf.report import acceptance_suite

SQ5 = math.sqrt(5.0)


def _j1(x: float) -> float:
    return float(j0j1(np.array([x]))[1][0])


def test_eval_kg_printed_closed_form():
    # lambda = 4, m = 1: J1(m sqrt(lambda)) / (4 pi)
    assert eval_kg(SQ5, 1.0, 1.0, KGForm.PRINTED) == pytest.approx(
        _j1(2.0) / (4 * math.pi), rel=1e-13)
    assert eval_kg(SQ5, 1.0, 1.0, KGForm.PRINTED) == pytest.approx(
        4.5894301979e-02, rel=1e-9)


def test_eval_kg_rewritten_closed_form():
    # same point: m J1(m sqrt(lambda)) / (8 pi sqrt(lambda))
    assert eval_kg(SQ5, 1.0, 1.0, KGForm.REWRITTEN) == pytest.approx(
        _j1(2.0) / (16 * math.pi), rel=1e-13)
    # the two forms differ by the factor 2 sqrt(lambda) / m
    p = eval_kg(3.0, 1.0, 2.0, KGForm.PRINTED)
    w = eval_kg(3.0, 1.0, 2.0, KGForm.REWRITTEN)
    lam = 9.0 - 1.0
    assert p == pytest.approx(w * 2.0 * math.sqrt(lam) / 2.0, rel=1e-13)


def test_eval_kg_outside_cone_is_zero():
    assert eval_kg(0.5, 2.0, 1.0, KGForm.PRINTED) == 0.0
    assert eval_kg(0.5, 2.0, 1.0, KGForm.REWRITTEN) == 0.0


def test_eval_kg_error_paths():
    with pytest.raises(OnSingularSupportError):
        eval_kg(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        eval_kg(2.0, 1.0, -0.5)


def test_eval_kg_massless_limit():
    # m -> 0 collapses the rewritten form to the massless interior constant
    lam = 3.0
    v = eval_kg(2.0, 1.0, 1e-8, KGForm.REWRITTEN)
    assert v == pytest.approx(1e-8 * (1e-8 * math.sqrt(lam) / 2.0)
                              / (8 * math.pi * math.sqrt(lam)), rel=1e-6)


def test_bessel_identity_integral_pinned():
    # the oscillatory integral converges to (pi/2) J0(b)
    val, err = bessel_identity_integral(1.0)
    assert val == pytest.approx(1.2019697153172066, abs=max(1e-9, 5 * err))
    val2, err2 = bessel_identity_integral(2.0)
    assert val2 == pytest.approx(0.35168681347830033, abs=max(1e-9, 5 * err2))


@pytest.mark.parametrize("b", [0.5, 5.0, 10.0])
def test_bessel_identity_integral_vs_kernel(b):
    val, err = bessel_identity_integral(b)
    ref = 0.5 * math.pi * float(j0j1(np.array([b]))[0][0])
    assert val == pytest.approx(ref, abs=max(1e-8, 10 * err))


def test_bessel_identity_integral_rejects_nonpositive():
    with pytest.raises(DomainError):
        bessel_identity_integral(0.0)
    with pytest.raises(DomainError):
        bessel_identity_integral(-1.0)


def test_m_route_rewritten_is_half_canonical():
    # superposing the rewritten massive kernel over the mass parameter
    # reproduces one half of the canonical pairing
    suite = dict(acceptance_suite())
    phi = suite["mixed_shell"]
    res = pair_m_integration(phi, KGForm.REWRITTEN, QuadSpec.fast())
    base = pair_canonical(phi)
    tol = max(5.0 * res.abs_err, 3e-3 * abs(base.value))
    assert res.value == pytest.approx(0.5 * base.value, abs=tol)
