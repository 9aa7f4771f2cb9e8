import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from lamelattice.lattice_count import BodyParams
from lamelattice.special_fn import (
    FULL_SERIES, BesselParams, DomainError, MainTermParams, SeriesConfig, body_volume, c1, c2,
    gen_bessel, gen_bessel_asymptotic, lame_area, main_term, main_term_tail, psi_eta_series,
    sine_series,
)


def classical_j(nu: float, x: float) -> float:
    """Power series of the classical Bessel function J_nu, summed at 60 digits."""
    with mpmath.workdps(60):
        x = mpmath.mpf(x)
        half = x / 2
        total, m = mpmath.mpf(0), 0
        while True:
            term = (-1) ** m * half ** (2 * m + nu) / (mpmath.factorial(m) * mpmath.gamma(m + nu + 1))
            total += term
            if m > x and abs(term) < mpmath.mpf(10) ** -40:
                return float(total)
            m += 1


# -- oracles ------------------------------------------------------------------------


def test_lame_area_circle():
    assert lame_area(2) == pytest.approx(math.pi, rel=1e-14)


def test_lame_area_k3_against_planar_quadrature():
    quad, _ = integrate.quad(lambda u: (1 - u**3) ** (1 / 3), 0, 1, epsabs=1e-14, epsrel=1e-14)
    assert lame_area(3) == pytest.approx(4 * quad, rel=1e-10)
    assert 3.5332 <= lame_area(3) < 3.5333


def test_lame_area_tends_to_square():
    assert lame_area(1e6) == pytest.approx(4, rel=1e-5)


def test_ball_volume():
    assert body_volume(BodyParams(1, 2, relaxed=True)) == pytest.approx(4 * math.pi / 3, rel=1e-12)


def test_volume_matches_slice_quadrature():
    p = BodyParams(2, 3)
    a = p.m * p.k
    quad, _ = integrate.quad(lambda u: (1 - u**a) ** (2 / a), 0, 1, epsabs=1e-13, epsrel=1e-13)
    assert body_volume(p) == pytest.approx(lame_area(p.k) * 2 * quad, rel=1e-10)


def test_volume_matches_3d_quadrature():
    # |u1|^6 + (|u2|^3 + |u3|^3)^2 <= 1, integrate the u3 extent over the octant
    def top(u2, u1):
        r = math.sqrt(max(0.0, 1 - u1**6)) - u2**3
        return r ** (1 / 3) if r > 0 else 0.0

    def u2_max(u1):
        return math.sqrt(max(0.0, 1 - u1**6)) ** (1 / 3)

    val, _ = integrate.dblquad(top, 0, 1, 0, u2_max, epsabs=1e-9, epsrel=1e-9)
    assert body_volume(BodyParams(2, 3)) == pytest.approx(8 * val, rel=1e-4)


@pytest.mark.parametrize("k", [2, 3, 4.5, 8])
def test_supersphere_volume(k):
    # m = 1 gives |u1|^k + |u2|^k + |u3|^k <= 1
    expected = 8 * math.gamma(1 + 1 / k) ** 3 / math.gamma(1 + 3 / k)
    assert body_volume(BodyParams(1, k, relaxed=True)) == pytest.approx(expected, rel=1e-12)


def test_bessel_half_order_at_quarter_period():
    assert gen_bessel(BesselParams(2, 0.5), math.pi / 2) == pytest.approx(2 / math.pi, abs=1e-12)


def test_bessel_order_one_against_power_series():
    assert gen_bessel(BesselParams(2, 1.0), 1.0) == pytest.approx(classical_j(1.0, 1.0), abs=1e-10)


@pytest.mark.parametrize("nu", [0.5, 1.0, 1.5])
def test_bessel_reduces_to_classical(nu):
    xs = np.linspace(0.5, 50, 12)
    got = [gen_bessel(BesselParams(2, nu), x) for x in xs]
    want = [classical_j(nu, x) for x in xs]
    np.testing.assert_allclose(got, want, atol=1e-8, rtol=0)


def test_eta3_quadrature_near_asymptotic_form():
    bp = BesselParams(3, 2 / 3)
    amp = (3 / 5) ** (1 / 3) / math.sqrt(math.pi)
    j = gen_bessel(bp, 5.0)
    # within one amplitude / x of the leading form
    assert abs(j - float(gen_bessel_asymptotic(bp, 5.0))) <= amp / 5


def test_asymptotic_form_specialises_to_sine():
    b = 3.0
    y = np.linspace(25, 400, 50)
    want = (b / y) ** (1 / b) * np.sin(y - math.pi / (2 * b)) / math.sqrt(math.pi)
    np.testing.assert_allclose(gen_bessel_asymptotic(BesselParams(b, 2 / b), y), want, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("eta,nu", [(3, 0.5), (4, 1.2)])
def test_asymptotic_error_shrinks_like_one_over_x(eta, nu):
    bp = BesselParams(eta, nu)
    xs = [40.0, 80.0, 160.0, 320.0]
    amp = [x ** (eta * nu / 2 - bp.alpha - 1) for x in xs]
    err = [abs(gen_bessel(bp, x) - float(gen_bessel_asymptotic(bp, x))) / a for x, a in zip(xs, amp)]
    # calibrated: x * relative error peaks near 2.2 on this grid
    assert all(e * x < 4.0 for e, x in zip(err, xs)), err


def test_bessel_domain():
    with pytest.raises(DomainError):
        gen_bessel(BesselParams(2, -0.6), 1.0)
    with pytest.raises(DomainError):
        BesselParams(0.5, 1.0)
    with pytest.raises(DomainError):
        gen_bessel(BesselParams(2, 1.0), -1.0)


# -- psi series ----------------------------------------------------------------------


def test_empty_series():
    v = psi_eta_series(BesselParams(6, 0.5), 3.3, SeriesConfig(n_max=0))
    assert v.value == 0.0 and v.tail == math.inf


def test_partial_sums_within_tail():
    bp = BesselParams(6, 0.5)
    prev = psi_eta_series(bp, 3.3, SeriesConfig(n_max=10))
    for n in (20, 40, 80, 160):
        cur = psi_eta_series(bp, 3.3, SeriesConfig(n_max=n))
        assert abs(cur.value - prev.value) <= prev.tail
        assert cur.tail < prev.tail
        prev = cur


def test_series_domain():
    with pytest.raises(DomainError):
        psi_eta_series(BesselParams(2, 0.5), 1.0)
    with pytest.raises(ValueError):
        psi_eta_series(BesselParams(6, 0.5), 1.0, FULL_SERIES)


@pytest.mark.parametrize("x", [10.0, 10.5, 20.0, 20.5])
def test_series_sign_follows_sine_asymptotics(x):
    p = MainTermParams(6, 3)
    cfg = SeriesConfig(n_max=400)
    exact = lame_area(3) * psi_eta_series(BesselParams(6, 0.5), x, cfg).value
    asym = main_term(p, x, 1, "asymptotic", FULL_SERIES)
    assert math.copysign(1, exact) == math.copysign(1, asym)
    assert (exact < 0) == float(x).is_integer()


# -- main terms ----------------------------------------------------------------------


def test_c1_circle():
    assert c1(MainTermParams(2, 2)) == pytest.approx(2 / math.pi, rel=1e-14)


def test_c2_positive_and_symmetric_form():
    p = MainTermParams(4, 4)
    expected = 16 / math.pi * 4 ** 0.5 / (2 * math.pi) ** 0.5 * math.gamma(1.25) ** 2
    assert c2(p) == pytest.approx(expected, rel=1e-14)


def test_kind1_exact_vs_asymptotic_bounded_by_x():
    p = MainTermParams(4, 4)
    cfg = SeriesConfig(n_max=400)
    for x in np.linspace(20, 200, 10):
        gap = main_term(p, x, 1, "exact", cfg) - main_term(p, x, 1, "asymptotic", cfg)
        assert abs(gap) / x <= 1.0


@pytest.mark.parametrize("x", [3.0, 17.0, 250.0])
def test_kind1_integer_x_closed_form(x):
    a = 6.0
    p = MainTermParams(a, 3)
    want = c1(p) * x ** (2 - 2 / a) * (-math.sin(math.pi / a) * float(mpmath.zeta(1 + 2 / a)))
    assert main_term(p, x, 1, "asymptotic", FULL_SERIES) == pytest.approx(want, rel=1e-12)


def test_truncated_sine_series_tail_bound():
    p = MainTermParams(6, 3)
    x = 7.3
    for n in (50, 200, 800):
        cfg = SeriesConfig(n_max=n)
        gap = abs(main_term(p, x, 1, "asymptotic", cfg) - main_term(p, x, 1, "asymptotic", FULL_SERIES))
        assert gap <= main_term_tail(p, x, 1, cfg)


def test_kind2_exact_close_to_asymptotic():
    p = MainTermParams(6, 3)
    for x in (5.0, 10.3):
        gap = main_term(p, x, 2, "exact", FULL_SERIES) - main_term(p, x, 2, "asymptotic", FULL_SERIES)
        assert abs(gap) / x <= 1.0


def test_main_term_rejects_bad_arguments():
    p = MainTermParams(4, 3)
    with pytest.raises(ValueError):
        main_term(p, 2.0, 3)
    with pytest.raises(ValueError):
        main_term(p, 2.0, 1, mode="approx")
    with pytest.raises(DomainError):
        MainTermParams(3, 4)


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0.01, 50), s=st.floats(1.2, 3.0), phase=st.floats(0, 2 * math.pi))
def test_closed_form_sine_series_matches_partial_sums(x, s, phase):
    n = 20000
    partial = sine_series(x, s, phase, n_max=n)
    full = sine_series(x, s, phase)
    # the dropped tail is at most int_n^inf u^-s du
    assert abs(full - partial) <= n ** (1 - s) / (s - 1) + 1e-9


@settings(max_examples=30, deadline=None)
@given(x=st.floats(0.5, 100), shift=st.integers(1, 5))
def test_sine_series_is_periodic(x, shift):
    assert sine_series(x + shift, 1.5, 0.3) == pytest.approx(sine_series(x, 1.5, 0.3), abs=1e-9)
