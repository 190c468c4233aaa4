import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from diffmat import (
    DomainError,
    asymptotic_count_log,
    complex_power_bounds,
    exact_return_probability,
    gaussian_sandwich,
    growth_check,
    lu_factors,
    make_params,
    probability_bounds,
    taylor_bounds_check,
)
from diffmat.bounds import (
    auto_delta,
    box_constants,
    delta_limit,
    prefactor_exponent,
    remainder_bound,
    excess_exponent,
)
from diffmat.charfn import apply_inv_sqrt, apply_sqrt, inv_sqrt_coeffs
from diffmat.exact import count_brute


def test_asymptotic_log_example():
    mpmath.mp.dps = 40
    oracle = mpmath.log10(mpmath.mpf(2) ** mpmath.mpf(14.5) / (4 * mpmath.pi) ** mpmath.mpf(1.5))
    assert asymptotic_count_log(make_params(2, 3, 2)) == pytest.approx(float(oracle), abs=1e-12)
    assert 10 ** asymptotic_count_log(make_params(2, 3, 2)) == pytest.approx(520.14, abs=0.01)
    assert excess_exponent(3) == Fraction(5, 2)


@pytest.mark.parametrize("k", range(3, 13))
@pytest.mark.parametrize("g", [2, 3, 5, 7])
def test_exponent_consistency(g, k):
    lhs = prefactor_exponent(g, k) - Fraction(math.comb(k, 2) * (g - 1), 2)
    assert lhs == excess_exponent(k)


def test_ratio_at_lambda2():
    p = make_params(2, 3, 2)
    ratio = count_brute(p) / 10 ** asymptotic_count_log(p)
    assert ratio == pytest.approx(0.738, abs=0.005)


def test_box_constants_g2():
    assert box_constants(2) == pytest.approx((0.5, 0.5))
    lu = lu_factors(make_params(2, 3, 2), 0.01)
    assert (lu.D1, lu.D2) == pytest.approx((0.5, 0.5))


@pytest.mark.parametrize("g", range(2, 8))
def test_box_sandwich_witness(g):
    p = make_params(g, 3, 1)
    D1, D2 = box_constants(g)
    rng = np.random.default_rng(g)
    th = rng.uniform(-1, 1, (1000, p.d))
    assert np.abs(apply_inv_sqrt(p, apply_sqrt(p, th)) - th).max() <= 1e-10
    assert np.abs(apply_sqrt(p, th)).max() <= D2 + 1e-12
    y = rng.uniform(-D1, D1, (1000, p.d))
    assert np.abs(apply_inv_sqrt(p, y)).max() <= 1 + 1e-12
    # D1 is attained: a corner of [-D1, D1] hits the unit box boundary
    a, c = inv_sqrt_coeffs(g)
    corner = np.tile(np.sign([a + c] + [c] * (g - 2)) * D1, p.n_pairs)
    assert np.abs(apply_inv_sqrt(p, corner)).max() == pytest.approx(1.0)


def test_lu_vanish_as_delta_shrinks():
    p = make_params(2, 3, 4)
    lu = lu_factors(p, 1e-8)
    assert lu.L < 1e-15 and lu.U < 1e-15
    with pytest.raises(DomainError):
        lu_factors(p, 0)


@given(st.integers(1, 200), st.floats(1e-6, 1.0))
def test_l_below_u_when_admissible(lam, frac):
    p = make_params(2, 3, 2 * lam)
    delta = frac * delta_limit(p)
    if p.t < 2 * (p.d * delta) ** -3:
        lu = lu_factors(p, delta)
        assert lu.L <= lu.U


def test_lu_trend_along_schedule():
    p = make_params(2, 3, 2)
    prev = None
    for e in (6, 10, 14):
        t = 2**e
        lu = lu_factors(p, t ** (-5 / 12), t)
        cur = (abs(lu.L - 1), abs(lu.U - 1))
        if prev:
            assert cur[0] < prev[0] and cur[1] < prev[1]
        prev = cur


@pytest.mark.parametrize("lam", [2, 4])
def test_probability_bounds_contain_exact(lam):
    p = make_params(2, 3, lam)
    for delta in (0.002, auto_delta(p)):
        rep = probability_bounds(p, delta)
        assert rep.rigorous and rep.delta_ok and rep.t_ok
        assert rep.lower == pytest.approx(rep.prefactor * rep.L - rep.remainder)
        assert rep.upper == pytest.approx(rep.prefactor * rep.U + rep.remainder)
        assert rep.contains(exact_return_probability(p))


def test_probability_bounds_parity_case():
    p = make_params(2, 3, 1)
    delta = 0.002
    rep = probability_bounds(p, delta)
    assert rep.parity_case and rep.lower == 0
    assert rep.upper == pytest.approx(math.exp(-(11 / 192) * 2**-3 * 2 * delta**2))
    assert rep.contains(0)


def test_probability_bounds_flags():
    p = make_params(2, 3, 2)
    assert not probability_bounds(p, math.pi / 2).rigorous
    assert not probability_bounds(p, 0.01).delta_ok
    with pytest.raises(DomainError):
        probability_bounds(p, -1)
    # equality in the t condition counts as inadmissible
    q = make_params(2, 3, 2)
    d_eq = (2 / q.t) ** (1 / 3) / q.d
    assert not probability_bounds(q, d_eq * (1 + 1e-15)).t_ok


def test_remainder_and_limit():
    p = make_params(3, 3, 2)
    assert remainder_bound(p, 0.1) == pytest.approx(math.exp(-11 / 192 / 27 * 6 * 0.01))
    assert delta_limit(p) == pytest.approx(1.6 * 3.0**-6 / 9)


def test_complex_power_examples():
    pb = complex_power_bounds(0.9 + 0j, 7)
    assert pb.lower == pytest.approx(0.9**7, rel=1e-15) and pb.upper == pytest.approx(0.9**7, rel=1e-15)
    z = 1 + 0.01j
    pb = complex_power_bounds(z, 10)
    assert pb.lower <= (z**10).real <= pb.upper
    for bad in ((-1 + 0j, 3), (1 + 1j, 10), (1 + 0j, 1)):
        with pytest.raises(DomainError):
            complex_power_bounds(*bad)


@given(st.floats(0.3, 1.0), st.floats(-1.0, 1.0), st.integers(2, 200))
def test_complex_power_property_mpmath(re, frac, t):
    beta = frac * (1 - 1e-9) / math.sqrt(math.comb(t, 2))
    z = complex(re, beta * re)
    pb = complex_power_bounds(z, t)
    mpmath.mp.dps = 50
    exact = float(mpmath.re(mpmath.mpc(z.real, z.imag) ** t))
    scale = abs(z) ** t
    assert (pb.lower - exact) / scale <= 1e-15
    assert (exact - pb.upper) / scale <= 1e-15


def test_gaussian_sandwich_examples():
    s = gaussian_sandwich(1.0)
    assert (s.lower, s.mid, s.upper) == pytest.approx((1.572, 1.711, 1.993), abs=1e-3)
    s = gaussian_sandwich(0.1)
    assert s.lower <= s.mid <= s.upper
    assert (s.lower, s.mid, s.upper) == pytest.approx((0.1770, 0.1997, 0.2500), abs=1e-4)
    s = gaussian_sandwich(50.0)
    assert s.lower == pytest.approx(math.sqrt(2 * math.pi)) and s.upper == pytest.approx(math.sqrt(2 * math.pi))
    with pytest.raises(DomainError):
        gaussian_sandwich(0.0)


@given(st.floats(1e-4, 20.0))
def test_gaussian_mid_matches_quadrature(rho):
    s = gaussian_sandwich(rho)
    ref, _ = quad(lambda x: math.exp(-x * x / 2), -rho, rho, epsabs=1e-14, epsrel=1e-13)
    assert s.mid == pytest.approx(ref, rel=1e-12, abs=1e-14)
    assert s.lower <= s.mid + 1e-15 and s.mid <= s.upper + 1e-15


def test_taylor_examples():
    da, db = taylor_bounds_check(0.0, 0.0, 1)
    assert da <= 0 and db <= 0
    _, db = taylor_bounds_check(0.0, math.pi / 4, 2)
    assert db <= 0
    with pytest.raises(DomainError):
        taylor_bounds_check(1.0, 1.0, 4)
    with pytest.raises(DomainError):
        taylor_bounds_check(-1.0, 1.0, 2)


@given(st.floats(0, 10), st.floats(-10, 10), st.integers(1, 3))
def test_taylor_property_mpmath(a, b, j):
    da, db = taylor_bounds_check(a, b, j)
    assert da <= 1e-15 and db <= 1e-15
    mpmath.mp.dps = 50
    rem_a = abs(mpmath.exp(-a) - sum((-mpmath.mpf(a)) ** s / math.factorial(s) for s in range(j + 1)))
    bnd = min(2 * abs(a) ** j / math.factorial(j), abs(a) ** (j + 1) / math.factorial(j + 1))
    assert da == pytest.approx(float(rem_a) - bnd, abs=1e-13)
    rem_b = abs(mpmath.exp(1j * b) - sum((1j * mpmath.mpf(b)) ** s / math.factorial(s) for s in range(j + 1)))
    bnd = min(2 * abs(b) ** j / math.factorial(j), abs(b) ** (j + 1) / math.factorial(j + 1))
    assert db == pytest.approx(float(rem_b) - bnd, abs=1e-13)


def test_growth_check_examples():
    big = growth_check(make_params(2, 3, 2**20), 0.01)
    assert big.growth_ok and 0.01 < big.epsilon < 1 / 6
    assert big.delta == (2**21) ** (-5 / 12)
    small = growth_check(make_params(2, 3, 2), 0.01)
    assert not small.growth_ok
    with pytest.raises(DomainError):
        growth_check(make_params(2, 3, 2), 0.0)


@given(st.integers(2, 5), st.integers(3, 6), st.integers(1, 10**6))
def test_growth_delta_schedule(g, k, lam):
    gp = growth_check(make_params(g, k, lam), 0.01)
    assert gp.delta == (lam * g) ** (-5 / 12)
    assert gp.epsilon == pytest.approx(1 / 6 - k * math.log(g) / math.log(lam * g))

