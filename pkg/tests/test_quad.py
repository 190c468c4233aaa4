import math

import numpy as np
import pytest

from diffmat import (
    BudgetError,
    DomainError,
    QuadratureSpec,
    exact_return_probability,
    integrate_box_gaussian,
    integrate_box_phi,
    make_params,
    sandwich_report,
)
from diffmat.bounds import delta_limit
from diffmat.exact import dft_modulus
from diffmat.quad import (
    decomposition_check,
    gaussian_box_bounds,
    gaussian_full_mass,
    remainder_checks,
    torus_return_probability,
)


def test_spec_validation():
    for bad in ((4, 0.1, 2), (1, 0.1, 2), (3, 0.0, 2), (3, 0.1, -1)):
        with pytest.raises(DomainError):
            QuadratureSpec(*bad)
    assert QuadratureSpec(65, 0.1, 4).coarser().grid_per_axis == 33


def test_t_zero_gives_box_volume():
    p = make_params(2, 3, 2)
    v = integrate_box_phi(p, QuadratureSpec(5, 0.3, 0))
    assert v == pytest.approx((0.6) ** 3, rel=1e-14)


def test_budget():
    p = make_params(3, 4, 1)  # d = 12
    with pytest.raises(BudgetError):
        integrate_box_phi(p, QuadratureSpec(5, 0.1, 3))


def test_self_convergence_and_symmetry():
    p = make_params(2, 3, 2)
    a = integrate_box_phi(p, QuadratureSpec(33, 0.5, p.t))
    b = integrate_box_phi(p, QuadratureSpec(65, 0.5, p.t))
    assert abs(a.real - b.real) <= 0.01 * abs(b.real)
    assert abs(b.imag) <= 1e-8 * abs(b.real)


def test_decomposition_reassembles_exact_probability():
    p = make_params(2, 3, 2)
    dec = decomposition_check(p)
    assert dec["lambda0_size"] == 2
    assert dec["total"] == pytest.approx(3 / 32, rel=1e-6)
    assert dec["primary"] > dec["remainder"] > 0


def test_decomposition_parity_case():
    p = make_params(2, 3, 1)
    dec = decomposition_check(p)
    assert dec["primary"] == 0
    assert abs(dec["total"]) <= 1e-8


@pytest.mark.parametrize("delta", [0.5, 0.1])
def test_gaussian_box_containment(delta):
    p = make_params(2, 3, 2)
    v = integrate_box_gaussian(p, QuadratureSpec(33, delta, p.t))
    lo, hi = gaussian_box_bounds(p, delta, p.t)
    assert lo <= v <= hi


def test_gaussian_limits():
    p = make_params(2, 3, 2)
    tiny = integrate_box_gaussian(p, QuadratureSpec(5, 1e-6, p.t))
    assert tiny == pytest.approx((2e-6) ** 3, rel=1e-9)
    t = 10_000
    big = integrate_box_gaussian(p, QuadratureSpec(101, 0.16, t))  # 8 sigma
    assert big == pytest.approx(gaussian_full_mass(p, t), rel=1e-6)
    # full mass uses det M = g**(-g C(k,2))
    assert gaussian_full_mass(p, t) == pytest.approx((2 * math.pi / t) ** 1.5 * 2**3)


def test_sandwich_report_g2k3_lam8():
    p = make_params(2, 3, 8)
    delta = 0.999 * delta_limit(p)
    rep = sandwich_report(p, QuadratureSpec(21, delta, p.t), samples=10_000, seed=1)
    assert rep.ok, rep.offenders
    assert rep.points_checked == 21**3 + 10_000
    assert rep.lower_target <= rep.integral <= rep.upper_target


def test_sandwich_report_g3k3_random():
    p = make_params(3, 3, 2)
    delta = 0.999 * delta_limit(p)
    rep = sandwich_report(p, QuadratureSpec(5, delta, p.t), samples=10_000, seed=2)
    assert rep.violations == 0


def test_sandwich_report_flags_large_delta():
    # far outside the admissible range the integral targets are meaningless and flagged
    p = make_params(2, 3, 2)
    rep = sandwich_report(p, QuadratureSpec(9, 1.4, p.t))
    assert not rep.ok and not rep.integral_ok and rep.violations == 1


def test_theta_zero_pointwise():
    from diffmat.quad import SandwichReport, pointwise_check

    p = make_params(3, 3, 1)
    rep = SandwichReport(0.01, p.t, 0, 0, 0, 0, True)
    pointwise_check(p, np.zeros((1, p.d)), 0.01, rep)
    assert rep.ok and rep.min_real == pytest.approx(1.0)


@pytest.mark.parametrize("g,k", [(2, 3), (3, 3)])
def test_remainder_regions(g, k):
    p = make_params(g, k, 1)
    ra, rb = remainder_checks(p, 0.999 * delta_limit(p), 10_000, seed=4)
    assert ra.checked == rb.checked == 10_000
    assert ra.violations == 0 and rb.violations == 0


@pytest.mark.parametrize("case", [(2, 3, 2), (2, 3, 4), (3, 3, 1), (2, 2, 3)])
def test_torus_integral_on_dft_grid(case):
    p = make_params(*case)
    val = torus_return_probability(p, dft_modulus(p))
    assert val == pytest.approx(float(exact_return_probability(p)), rel=1e-10, abs=1e-14)
