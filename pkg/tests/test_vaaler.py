import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamelattice.special_fn import DomainError
from lamelattice.vaaler import build_vaaler, majorant_violations, rho, sawtooth, vaaler_eval


def rho_reference(xi: float) -> float:
    with mpmath.workdps(50):
        x = mpmath.mpf(xi)
        return float(mpmath.pi * x * (1 - x) * mpmath.cot(mpmath.pi * x) + x)


@pytest.mark.parametrize("w,want", [(0.25, -0.25), (0.0, -0.5), (1.75, 0.25), (-0.25, 0.25)])
def test_sawtooth_values(w, want):
    assert sawtooth(w) == want


def test_sawtooth_vectorised():
    np.testing.assert_array_equal(sawtooth(np.array([0.25, 0.0, 1.75])), [-0.25, -0.5, 0.25])


def test_rho_closed_values():
    assert rho(0.5) == pytest.approx(0.5, abs=1e-15)
    assert rho(0.25) == pytest.approx(3 * math.pi / 16 + 0.25, rel=1e-14)


@pytest.mark.parametrize("xi", [0.999, 0.9995, 1 - 1e-7, 1e-7, 0.0005, 0.001, 0.999 + 1e-12])
def test_rho_against_high_precision(xi):
    assert rho(xi) == pytest.approx(rho_reference(xi), rel=1e-12, abs=1e-15)


def test_rho_domain():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            rho(bad)


def test_coefficients_small_orders():
    assert build_vaaler(2, "alpha").coeffs == pytest.approx((1 / (2 * math.pi),), rel=1e-15)
    assert build_vaaler(2, "beta").coeffs == pytest.approx((0.25,))
    assert build_vaaler(4, "beta").coeffs == pytest.approx((3 / 16, 2 / 16, 1 / 16))


def test_eval_examples():
    assert vaaler_eval(build_vaaler(7, "alpha"), 0.0) == 0.0
    H = 9
    assert vaaler_eval(build_vaaler(H, "beta"), 0.0) == pytest.approx((H - 1) / (2 * H), rel=1e-14)
    assert vaaler_eval(build_vaaler(2, "alpha"), 0.25) == pytest.approx(-1 / (2 * math.pi), rel=1e-14)


def test_build_rejects_bad_order_and_kind():
    for H in (1, 0, 2.5):
        with pytest.raises(ValueError):
            build_vaaler(H, "alpha")
    with pytest.raises(ValueError):
        build_vaaler(4, "gamma")


@settings(max_examples=60)
@given(H=st.integers(2, 40))
def test_beta_sum_closed_form(H):
    assert math.fsum(build_vaaler(H, "beta").coeffs) == pytest.approx((H - 1) / (2 * H), rel=1e-13)


@settings(max_examples=100)
@given(H=st.integers(2, 64), w=st.floats(-1e4, 1e4), shift=st.integers(-50, 50))
def test_polynomials_periodic(H, w, shift):
    for kind in ("alpha", "beta"):
        v = build_vaaler(H, kind)
        assert vaaler_eval(v, w + shift) == pytest.approx(vaaler_eval(v, w), abs=1e-9)


@settings(max_examples=100)
@given(H=st.integers(2, 64), w=st.floats(0.0, 1.0))
def test_symmetry(H, w):
    # psi_H is odd, psi_H* is even
    a, b = build_vaaler(H, "alpha"), build_vaaler(H, "beta")
    assert vaaler_eval(a, -w) == pytest.approx(-vaaler_eval(a, w), abs=1e-12)
    assert vaaler_eval(b, -w) == pytest.approx(vaaler_eval(b, w), abs=1e-12)


@settings(max_examples=100)
@given(H=st.integers(2, 128), w=st.floats(-100, 100))
def test_majorant_nonnegative(H, w):
    # Fejer-type kernel: psi_H* + 1/(2H) never goes negative
    assert vaaler_eval(build_vaaler(H, "beta"), w) + 1 / (2 * H) >= -1e-12


@settings(max_examples=200)
@given(H=st.integers(2, 128), w=st.floats(-1e3, 1e3))
def test_majorant_bound_pointwise(H, w):
    assert majorant_violations(H, np.array([w])) == 0


def test_majorant_bound_near_integers():
    w = np.concatenate([k + np.linspace(-1e-6, 1e-6, 201) for k in range(-3, 4)])
    for H in (2, 3, 16, 257):
        assert majorant_violations(H, w) == 0


def test_approximation_improves_with_order():
    w = np.linspace(0.1, 0.9, 81)
    errs = [np.max(np.abs(sawtooth(w) - vaaler_eval(build_vaaler(H, "alpha"), w))) for H in (4, 16, 64)]
    assert errs[0] > errs[1] > errs[2]


@settings(max_examples=200)
@given(xi=st.floats(1e-9, 1 - 1e-9))
def test_rho_accurate_everywhere(xi):
    assert rho(xi) == pytest.approx(rho_reference(xi), rel=1e-12, abs=1e-15)
