"""Closed-form evaluators: pinned values, route identities, error paths."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from offshell_gf import (
    DegenerateError,
    Event5,
    GFVariant,
    I_closed,
    I_quadrature,
    OnSingularSupportError,
    Region5,
    Signature,
    UndefinedAtTauZeroError,
    classify,
    eval_canonical,
    eval_g1_g2,
    eval_k5_route,
    eval_lh_principal,
    eval_oh_published,
    eval_retarded,
    eval_slice,
    invariants,
)

# values pinned from this library's own evaluators after they were
# cross-validated against the direct momentum-space quadrature
PIN_INTERIOR = 8.955612003918067e-03      # (t, r, tau) = (2, 1, 1), Q = 2
PIN_INTERIOR_2 = 5.554452057129414e-03    # (2, 1, 0.5)
PIN_K5_AXIS = 4.874817720876269e-03       # (2, 1, 0), Q = 3
PIN_OH = 1.770809559721502e-03            # (2, 1, 0.5)


def test_canonical_pinned_values():
    assert eval_canonical(Event5(2, 1, 1)) == pytest.approx(PIN_INTERIOR, rel=1e-13)
    assert eval_canonical(Event5(2, 1, 0.5)) == pytest.approx(PIN_INTERIOR_2, rel=1e-13)
    # closed form: Q^(-3/2) / (4 pi^2) inside the five-cone
    q = 4.0 - 1.0 - 1.0
    assert PIN_INTERIOR == pytest.approx(q ** -1.5 / (4 * math.pi**2), rel=1e-13)


def test_canonical_zero_outside():
    assert eval_canonical(Event5(0.5, 3.0, 0.0)) == 0.0
    assert eval_canonical(Event5(2.0, 1.0, 2.2)) == 0.0


def test_canonical_even_in_time_and_tau():
    a = eval_canonical(Event5(2, 1, 1))
    assert eval_canonical(Event5(-2, 1, 1)) == a
    assert eval_canonical(Event5(2, 1, -1)) == a


def test_retarded_is_gated_double():
    e = Event5(2, 1, 1)
    assert eval_retarded(e) == pytest.approx(2 * eval_canonical(e), rel=1e-14)
    assert eval_retarded(Event5(2, 1, -1)) == 0.0
    assert eval_retarded(Event5(-2, 1, 1)) == pytest.approx(2 * PIN_INTERIOR, rel=1e-13)


def test_lh_principal_signs():
    e = Event5(2, 1, 1)
    assert eval_lh_principal(e) == pytest.approx(-eval_canonical(e), rel=1e-14)
    assert eval_lh_principal(e, signature=Signature.PLUS) == eval_lh_principal(e)
    # the opposite-signature closed form lives on the other support
    v = eval_lh_principal(Event5(0.5, 3.0, 2.0), signature=Signature.MINUS)
    assert math.isfinite(v)


def test_oh_published_pinned_and_differs():
    e = Event5(2, 1, 0.5)
    assert eval_oh_published(e) == pytest.approx(PIN_OH, rel=1e-12)
    assert abs(eval_oh_published(e) - eval_canonical(e)) > 0.1 * abs(eval_canonical(e))


def test_k5_route_pinned():
    assert eval_k5_route(Event5(2, 1, 0)) == pytest.approx(PIN_K5_AXIS, rel=1e-12)


def test_split_terms_sum_to_canonical_inside():
    e = Event5(2, 1, 1)
    g1, g2 = eval_g1_g2(e)
    assert g1 + g2 == pytest.approx(eval_canonical(e), rel=1e-12)


def test_split_terms_cancel_outside():
    g1, g2 = eval_g1_g2(Event5(0.5, 3.0, 1.0))
    assert g1 == pytest.approx(-g2, rel=1e-12)
    assert g1 != 0.0


def test_split_terms_error_paths():
    with pytest.raises(UndefinedAtTauZeroError):
        eval_g1_g2(Event5(2, 1, 0))
    with pytest.raises(OnSingularSupportError):
        eval_g1_g2(Event5(1, 1, 0.5))  # on the 4d cone


def test_singular_support_raises():
    for fn in (eval_canonical, eval_retarded, eval_oh_published, eval_k5_route):
        with pytest.raises(OnSingularSupportError):
            fn(Event5(2.0, 1.0, math.sqrt(3.0)))  # on the 5d cone
    with pytest.raises(OnSingularSupportError):
        eval_oh_published(Event5(1.0, 1.0, 0.5))  # 4d cone pole


def test_lh_minus_signature_has_its_own_cone():
    # the (-) closed form is singular on r^2 - t^2 - tau^2 = 0, not on Q = 0
    with pytest.raises(OnSingularSupportError):
        eval_lh_principal(Event5(1.0, 2.0, math.sqrt(3.0)), signature=Signature.MINUS)
    v = eval_lh_principal(Event5(2.0, 1.0, math.sqrt(3.0)), signature=Signature.MINUS)
    assert math.isfinite(v)


interior = st.tuples(
    st.floats(min_value=1.2, max_value=8.0),
    st.floats(min_value=0.05, max_value=1.0),
    st.floats(min_value=-0.6, max_value=0.6),
)


@settings(max_examples=120, deadline=None)
@given(pt=interior)
def test_k5_route_reproduces_canonical_inside(pt):
    t, r, tau = pt
    e = Event5(t, r, tau)
    if classify(e) is not Region5.TIMELIKE5:
        return
    assert eval_k5_route(e) == pytest.approx(eval_canonical(e), rel=1e-11)


exterior = st.tuples(
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=2.0, max_value=9.0),
    st.floats(min_value=-3.0, max_value=3.0),
)


@settings(max_examples=120, deadline=None)
@given(pt=exterior)
def test_k5_route_exact_zero_outside(pt):
    t, r, tau = pt
    e = Event5(t, r, tau)
    if classify(e) is not Region5.SPACELIKE4:
        return
    assert eval_k5_route(e) == 0.0
    assert eval_canonical(e) == 0.0


# --- the radial weight integral behind the interior closed form ----------

PIN_I_21 = math.pi / (3.0 * math.sqrt(3.0))
PIN_I_13 = 0.6232252401402306


def test_weight_integral_pinned():
    assert I_closed(2.0, 1.0) == pytest.approx(PIN_I_21, rel=1e-13)
    assert I_closed(1.0, 3.0) == pytest.approx(PIN_I_13, rel=1e-13)


def test_weight_integral_quadrature_agrees():
    for a, b in [(2.0, 1.0), (1.0, 3.0), (0.7, 2.4), (5.0, 0.3)]:
        val, err = I_quadrature(a, b)
        assert val == pytest.approx(I_closed(a, b), abs=max(5 * err, 1e-10))


def test_weight_integral_degenerate_raises():
    with pytest.raises(DegenerateError):
        I_closed(0.0, 1.0)
    with pytest.raises(DegenerateError):
        I_closed(1.0, 1.0 + 1e-16)


ab = st.floats(min_value=0.05, max_value=20.0)


@settings(max_examples=150, deadline=None)
@given(a=ab, b=ab)
def test_weight_integral_antisymmetry(a, b):
    if abs(abs(a) - abs(b)) < 1e-6 * max(a, b):
        return
    assert I_closed(-a, -b) == pytest.approx(-I_closed(a, b), rel=1e-12)


# --- vectorized slice evaluation ------------------------------------------

def test_eval_slice_masks_singular_rows():
    t = np.array([2.0, 2.0, 1.0])
    r = np.array([1.0, 1.0, 1.0])
    tau = np.array([1.0, math.sqrt(3.0), 0.5])
    vals, regions, flags = eval_slice(GFVariant.CANONICAL, t, r, tau)
    assert vals[0] == pytest.approx(PIN_INTERIOR, rel=1e-13)
    assert np.isnan(vals[1]) and "ON_SINGULAR_SUPPORT" in flags[1]
    # the 4d cone is regular for this variant: exterior value, no flag
    assert vals[2] == 0.0 and flags[2] == ""
    assert regions[0] is Region5.TIMELIKE5 and regions[2] is Region5.CONE4


def test_eval_slice_split_terms_tau_zero():
    t = np.array([2.0])
    r = np.array([1.0])
    tau = np.array([0.0])
    vals, _, flags = eval_slice(GFVariant.G1, t, r, tau)
    assert np.isnan(vals[0]) and "UNDEFINED_AT_TAU_ZERO" in flags[0]


def test_eval_slice_matches_scalar_path():
    rng = np.random.default_rng(7)
    t = rng.uniform(1.5, 3.0, size=40)
    r = rng.uniform(0.1, 1.0, size=40)
    tau = rng.uniform(-0.5, 0.5, size=40)
    vals, regions, flags = eval_slice(GFVariant.RETARDED, t, r, tau)
    for i in range(t.size):
        e = Event5(t[i], r[i], tau[i])
        if flags[i]:
            continue
        assert vals[i] == pytest.approx(eval_retarded(e), rel=1e-13)
        assert regions[i] is invariants(e).region
