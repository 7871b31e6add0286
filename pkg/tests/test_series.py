from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monopole.model import Params, rhs
from monopole.reference import table1
from monopole.series import (
    SeedCoeffs,
    SeriesBlowupError,
    SeriesConfigError,
    TaylorSeries,
    closed_form_coeffs,
    compute_coeffs,
    eval_series,
    recurrence_coeffs,
    verify_against_paper,
)


def test_a3_closed_form_example():
    s = compute_coeffs(SeedCoeffs(1.0, -1.0), Params(1.0, 0.0), 4)
    assert s.phi_coeff(3) == pytest.approx(-0.8, abs=1e-15)


def test_b4_closed_form_example():
    s = compute_coeffs(SeedCoeffs(1.0, -1.0), Params(1.0, 0.0), 4)
    assert s.gamma_coeff(4) == pytest.approx(0.8, abs=1e-15)


@pytest.mark.parametrize("lam", [0.0, 2.5])
def test_zero_seed_stays_zero(lam):
    s = compute_coeffs(SeedCoeffs(0.0, 0.0), Params(0.7, lam), 20)
    assert not s.a.any() and not s.b.any()


def test_layout_and_leading_terms():
    seed = SeedCoeffs(1.3, -0.4)
    s = compute_coeffs(seed, Params(2.0, 1.0), 10)
    assert s.a.shape == (6,) and s.b.shape == (5,)
    assert s.a[0] == seed.a1 and s.b[0] == seed.b2
    # parity: no even phi or odd gamma terms
    p, g = s.dense()
    assert not p[0::2].any() and not g[1::2].any()


@pytest.mark.parametrize("order", [0, 3, 66, 2.0])
def test_bad_order(order):
    with pytest.raises(SeriesConfigError):
        compute_coeffs(SeedCoeffs(1, -1), Params(1, 0), order)


def test_blowup_guard():
    with pytest.raises(SeriesBlowupError):
        compute_coeffs(SeedCoeffs(1e4, -1e4), Params(1e-3, 0.0), 20)


def test_eval_at_origin():
    s = compute_coeffs(SeedCoeffs(1.7, -1.1), Params(1, 1))
    st0 = eval_series(s, 0.0)
    assert (st0.gamma, st0.dgamma, st0.phi, st0.dphi) == (0.0, 0.0, 0.0, 1.7)


def test_eval_two_term_series():
    params = Params(1.0, 0.0)
    seed = SeedCoeffs(2.0, -3.0)
    s = TaylorSeries(params, seed, 2, np.array([2.0, 0.0]), np.array([-3.0]))
    st = eval_series(s, 0.1)
    assert st.gamma == pytest.approx(-0.03, abs=1e-15)
    assert st.dgamma == pytest.approx(-0.6, abs=1e-15)
    assert st.phi == pytest.approx(0.2, abs=1e-15)
    assert st.dphi == pytest.approx(2.0, abs=1e-15)


def test_truncation_tail_mild_seed():
    params, seed = Params(1.0, 0.0), SeedCoeffs(1.67098122, -1.02894746)
    hi = eval_series(compute_coeffs(seed, params, 10), 0.01).as_array()
    lo = eval_series(compute_coeffs(seed, params, 8), 0.01).as_array()
    assert np.max(np.abs(hi - lo)) <= 1e-14


@pytest.mark.parametrize("row", table1(), ids=lambda r: f"{r.epsilon}-{r.lam}")
def test_truncation_tail_matches_dropped_terms(row):
    params, seed = Params(row.epsilon, row.lam), SeedCoeffs(row.a1, row.b2)
    full = compute_coeffs(seed, params, 10)
    hi = eval_series(full, 0.01).as_array()
    lo = eval_series(compute_coeffs(seed, params, 8), 0.01).as_array()
    r = 0.01
    b10, a11 = full.gamma_coeff(10), full.phi_coeff(11)
    dropped = np.array([b10 * r**10, 10 * b10 * r**9, a11 * r**11, 11 * a11 * r**10])
    # equal up to the rounding of the summed state (a few ulp of each component)
    ulp = np.spacing(np.maximum(np.abs(hi), 1.0))
    assert np.all(np.abs((hi - lo) - dropped) <= 4 * ulp)
    # stiff cells carry O(1e5) high coefficients, so the tail reaches ~4e-12
    assert np.max(np.abs(hi - lo)) <= 1e-11


def _mp_residual(p, g, eps, lam, r):
    """Residual of both ODEs for power-indexed coefficient lists at radius r."""
    ev = lambda c, k: sum(c[n] * mpmath.ff(n, k) * r ** (n - k) for n in range(k, len(c)))  # noqa: E731
    G, d2G = ev(g, 0), ev(g, 2)
    P, dP, d2P = ev(p, 0), ev(p, 1), ev(p, 2)
    s = 1 + 2 * G
    res_g = d2G - (2 / eps) * P**2 * s - 2 / r**2 * (G**2 + G) * s
    res_p = d2P + 2 * dP / r - 2 * P / r**2 * s**2 - 2 * lam * P * (P**2 - 1)
    return max(abs(res_g), abs(res_p))


@pytest.mark.parametrize("order", [6, 8, 10, 14])
def test_recursion_consistency(order):
    # the same recursion in 60-digit arithmetic, so rounding cannot mask truncation
    with mpmath.workdps(60):
        mpf = mpmath.mpf
        eps, lam = mpf(1), mpf(1)
        p, g = recurrence_coeffs(mpf("1.67098122"), mpf("-1.02894746"), eps, lam, order)
        radii = [mpf(10) ** (-4 + k / 4) for k in range(9)]
        ratios = [_mp_residual(p, g, eps, lam, r) / r ** (order - 2) for r in radii]
    # residual / r**(N-2) stays bounded (in fact shrinks) as r -> 0
    assert all(x <= ratios[-1] * (1 + 1e-12) for x in ratios)
    assert ratios[-1] < 1e3


def test_generic_recursion_matches_float_path():
    seed, params = SeedCoeffs(2.5, -3.0), Params(0.3, 10.0)
    s = compute_coeffs(seed, params, 12)
    p, g = recurrence_coeffs(Fraction(5, 2), Fraction(-3), Fraction(3, 10), Fraction(10), 12)
    dense_p, dense_g = s.dense()
    assert [float(x) for x in p] == pytest.approx(list(dense_p), rel=1e-13)
    assert [float(x) for x in g] == pytest.approx(list(dense_g), rel=1e-13)


def test_series_satisfies_ode_in_double_precision():
    s = compute_coeffs(SeedCoeffs(2.0, -1.5), Params(0.5, 3.0), 16)
    for r in (1e-3, 5e-3, 1e-2):
        st = eval_series(s, r)
        d = rhs(st, s.params)
        p, g = s.dense()
        k = np.arange(p.size)
        d2g = np.polynomial.polynomial.polyval(r, (g * k * (k - 1))[2:])
        d2p = np.polynomial.polynomial.polyval(r, (p * k * (k - 1))[2:])
        assert d[1] == pytest.approx(d2g, rel=1e-9)
        assert d[3] == pytest.approx(d2p, rel=1e-9)


def test_leading_order_scaling():
    params = Params(1.0, 0.0)
    base = compute_coeffs(SeedCoeffs(1.0, 0.0), params, 6)
    for s in (0.5, 2.0, 3.0):
        scaled = compute_coeffs(SeedCoeffs(s, 0.0), params, 6)
        assert scaled.phi_coeff(3) == 0.0 == base.phi_coeff(3)
        assert scaled.gamma_coeff(4) == pytest.approx(s**2 * base.gamma_coeff(4), rel=1e-15)


def test_verify_zero_seed_is_exact():
    assert verify_against_paper(SeedCoeffs(0.0, 0.0), Params(1.0, 3.0)) == 0.0


@pytest.mark.parametrize("eps", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("lam", [0.0, 1.0, 30.0])
def test_verify_random_seeds(eps, lam):
    rng = np.random.default_rng(int(eps * 100 + lam))
    for a1, b2 in rng.uniform(-10, 10, size=(100, 2)):
        assert verify_against_paper(SeedCoeffs(a1, b2), Params(eps, lam)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(a1=st.floats(-10, 10), b2=st.floats(-10, 10), eps=st.floats(0.05, 50), lam=st.floats(0, 50))
def test_verify_property(a1, b2, eps, lam):
    seed, params = SeedCoeffs(a1, b2), Params(eps, lam)
    s = compute_coeffs(seed, params, 10)
    ref = closed_form_coeffs(seed, params)
    for name, value in ref.items():
        n = int(name[1:])
        got = s.phi_coeff(n) if name[0] == "a" else s.gamma_coeff(n)
        # absolute floor guards against cancellation in the closed forms
        scale = max(abs(value), 1e-9 * max(1.0, abs(a1), abs(b2)) ** n)
        assert abs(got - value) <= 1e-11 * scale
