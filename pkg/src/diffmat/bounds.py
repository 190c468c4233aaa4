"""Asymptotic main term, two-sided return-probability bounds and helpers.

Everything here is scalar arithmetic.  Quantities that can overflow for
large ``t`` (the prefactor, powers like ``(1 + x)**t``) are formed in log
space.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy.special import erf

from .charfn import inv_sqrt_coeffs, sqrt_coeffs
from .errors import DomainError
from .params import Params

LOG10_E = math.log10(math.e)


def excess_exponent(k: int) -> Fraction:
    """Excess exponent ``(3k-4)(k-1)/4`` of g in the asymptotic count."""
    return Fraction((3 * k - 4) * (k - 1), 4)


def prefactor_exponent(g: int, k: int) -> Fraction:
    """Exponent ``(g/2) C(k,2) + C(k-1,2)`` of g in the local-limit prefactor."""
    return Fraction(g * comb(k, 2), 2) + comb(k - 1, 2)


def asymptotic_count_log(p: Params) -> float:
    """log10 of ``g**(k lam g + (3k-4)(k-1)/4) / (2 pi lam)**(d/2)``."""
    e = p.k * p.t + float(excess_exponent(p.k))
    return e * math.log10(p.g) - p.d / 2 * math.log10(2 * math.pi * p.lam)


def asymptotic_count(p: Params) -> float:
    """The main term itself; ``inf`` when it overflows a float."""
    lg = asymptotic_count_log(p)
    return 10.0**lg if lg < 308 else math.inf


def log_prefactor(p: Params, t: int | None = None) -> float:
    """Natural log of ``g**((g/2)C(k,2) + C(k-1,2)) / (2 pi t)**(d/2)``."""
    t = p.t if t is None else t
    return float(prefactor_exponent(p.g, p.k)) * math.log(p.g) - p.d / 2 * math.log(2 * math.pi * t)


def box_constants(g: int) -> tuple[float, float]:
    """``(D1, D2)`` with ``[-D1, D1]^d <= P[-1, 1]^d <= [-D2, D2]^d``.

    ``D2`` is the max absolute row sum of the square-root block ``Q`` and
    ``D1`` the reciprocal of that of ``Q**-1``.
    """
    a, b = sqrt_coeffs(g)
    D2 = abs(a + b) + (g - 2) * abs(b)
    ai, c = inv_sqrt_coeffs(g)
    D1 = 1.0 / (abs(ai + c) + (g - 2) * abs(c))
    return D1, D2


def _pow(base: float, expo: float) -> float:
    if base <= 0:
        return base**expo if float(expo).is_integer() else math.nan
    try:
        return math.exp(expo * math.log(base))
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class LU:
    L: float
    U: float
    D1: float
    D2: float


def lu_factors(p: Params, delta: float, t: int | None = None) -> LU:
    """Correction factors ``L`` and ``U`` of the two-sided bounds."""
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    t = p.t if t is None else t
    D1, D2 = box_constants(p.g)
    x = p.d * delta
    half_d = p.d / 2
    L = (
        _pow(1 + t * t * x**6, -0.5)
        * _pow(1 - x**4 / 3, t)
        * _pow(-math.expm1(-t / 2 * (D1 * delta) ** 2), half_d)
    )
    U = (
        _pow(1 + x**6 / 4, t / 2)
        * _pow(1 + x**4 / 3, t)
        * _pow(-math.expm1(-t * (D2 * delta) ** 2), half_d)
    )
    return LU(L, U, D1, D2)


def remainder_bound(p: Params, delta: float, t: int | None = None) -> float:
    """``exp(-(11/192) g**-k t delta**2)``, the bound on the off-box integral."""
    t = p.t if t is None else t
    return math.exp(-11 / 192 * p.g ** (-p.k) * t * delta * delta)


def delta_limit(p: Params) -> float:
    """Admissibility threshold ``(8/5) g**(-k-3) k**-2`` for delta."""
    return 1.6 * p.g ** (-p.k - 3) / p.k**2


def auto_delta(p: Params) -> float:
    """``t**(-5/12)`` capped just below the admissibility threshold."""
    return min(p.t ** (-5 / 12), 0.999 * delta_limit(p))


@dataclass(frozen=True)
class BoundsReport:
    delta: float
    delta_ok: bool
    t_ok: bool
    growth_ok: bool
    parity_case: bool
    rigorous: bool
    L: float
    U: float
    prefactor: float
    log10_prefactor: float
    remainder: float
    lower: float
    upper: float
    asymptotic_log10: float

    def contains(self, prob) -> bool:
        return self.lower <= float(prob) <= self.upper

    def as_dict(self) -> dict:
        return asdict(self)


def probability_bounds(p: Params, delta: float) -> BoundsReport:
    """Two-sided bounds on ``P(X_t = 0)`` at box half-width ``delta``.

    When g is even and lambda odd only the remainder term survives, so the
    upper bound is the remainder and the lower bound is 0.  Inadmissible
    ``delta`` still yields numbers, with ``rigorous`` set to False.
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    t = p.t
    delta_ok = delta < delta_limit(p) and delta < math.pi / p.g
    x = p.d * delta
    t_ok = t < 2 * x ** (-3)
    growth_ok = _growth_epsilon(p) > 0 and p.k >= 3
    parity = p.parity_flag
    lu = lu_factors(p, delta)
    lp = log_prefactor(p)
    pref = math.exp(lp)
    rem = remainder_bound(p, delta)
    if parity:
        lower, upper = 0.0, rem
        rigorous = delta_ok
    else:
        lower = pref * lu.L - rem
        upper = pref * lu.U + rem
        rigorous = delta_ok and t_ok
    return BoundsReport(
        delta=delta, delta_ok=delta_ok, t_ok=t_ok, growth_ok=growth_ok,
        parity_case=parity, rigorous=rigorous, L=lu.L, U=lu.U,
        prefactor=pref, log10_prefactor=lp * LOG10_E, remainder=rem,
        lower=lower, upper=upper, asymptotic_log10=asymptotic_count_log(p),
    )


@dataclass(frozen=True)
class PowerBounds:
    lower: float
    upper: float


def complex_power_bounds(z: complex, t: int) -> PowerBounds:
    """Bounds on ``Re(z**t)`` from ``Re z`` and ``beta = Im z / Re z``."""
    z = complex(z)
    if t < 2:
        raise DomainError("t must be an integer >= 2")
    if z.real <= 0:
        raise DomainError("Re(z) must be positive")
    beta = z.imag / z.real
    alpha = 1 - comb(t, 2) * beta * beta
    if alpha <= 0:
        raise DomainError("alpha(z, t) must be positive")
    # log1p keeps both bounds accurate to a few ulp when beta is tiny, where
    # the lower bound is tight to first order in beta**2.
    upper = z.real**t * math.exp(t / 2 * math.log1p(beta * beta))
    lower = upper * math.exp(-0.5 * math.log1p((t / alpha) ** 2 * beta * beta))
    return PowerBounds(lower, upper)


@dataclass(frozen=True)
class Sandwich:
    lower: float
    mid: float
    upper: float


def gaussian_sandwich(rho):
    """``int_{-rho}^{rho} exp(-x**2/2) dx`` with its two closed-form bounds.

    Vectorised: array input gives arrays in the returned fields.
    """
    r = np.asarray(rho, dtype=float)
    if np.any(r <= 0):
        raise DomainError("rho must be positive")
    lower = np.sqrt(-2 * np.pi * np.expm1(-r * r / 2))
    upper = np.sqrt(-2 * np.pi * np.expm1(-r * r))
    mid = math.sqrt(2 * math.pi) * erf(r / math.sqrt(2))
    if r.ndim == 0:
        return Sandwich(float(lower), float(mid), float(upper))
    return Sandwich(lower, mid, upper)


def _exp_remainder(x: np.ndarray, j: np.ndarray) -> np.ndarray:
    """``exp(x) - sum_{s<=j} x**s/s!`` computed without cancellation.

    Small ``|x|`` sums the tail of the series; larger ``|x|`` subtracts
    directly, where cancellation is harmless relative to the remainder.
    """
    x = np.asarray(x, dtype=complex)
    j = np.broadcast_to(np.asarray(j), x.shape)
    small = np.abs(x) < 2
    out = np.empty(x.shape, dtype=complex)
    xs, js = x[small], j[small]
    term = np.ones_like(xs)
    tail = np.zeros_like(xs)
    for s in range(1, 40):
        term = term * xs / s
        tail += np.where(s > js, term, 0)
    out[small] = tail
    xl, jl = x[~small], j[~small]
    poly = np.zeros_like(xl)
    term = np.ones_like(xl)
    for s in range(0, 4):
        poly += np.where(s <= jl, term, 0)
        term = term * xl / (s + 1)
    out[~small] = np.exp(xl) - poly
    return out


def taylor_bounds_check(a, b, j):
    """Defects of the two Taylor remainder bounds for ``exp(-a)`` and ``exp(ib)``.

    Each defect is ``|remainder| - min(2|x|**j/j!, |x|**(j+1)/(j+1)!)``; a
    valid bound gives a defect ``<= 0``.  Inputs broadcast; ``j`` in 1..3.
    """
    a, b, j = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(j))
    if np.any((j < 1) | (j > 3)):
        raise DomainError("j must lie in {1, 2, 3}")
    if np.any(a < 0):
        raise DomainError("a must be >= 0")
    fact = np.array([1, 1, 2, 6, 24])

    def bound(x):
        x = np.abs(x)
        return np.minimum(2 * x**j / fact[j], x ** (j + 1) / fact[j + 1])

    da = np.abs(_exp_remainder(-a, j)) - bound(a)
    db = np.abs(_exp_remainder(1j * b, j)) - bound(b)
    if da.ndim == 0:
        return float(da), float(db)
    return da, db


@dataclass(frozen=True)
class GrowthParams:
    epsilon0: float
    epsilon: float
    delta: float
    growth_ok: bool
    log10_remainder_ratio: float
    remainder_small: bool


def _growth_epsilon(p: Params) -> float:
    return 1 / 6 - p.k * math.log(p.g) / math.log(p.t) if p.t > 1 else -math.inf


def growth_check(p: Params, epsilon0: float) -> GrowthParams:
    """Position of ``(g, k, t)`` relative to the growth condition on k.

    ``epsilon`` solves ``k = (1/6 - epsilon) log t / log g``; the condition
    holds when ``epsilon > epsilon0`` and ``k >= 3``.  Also reports the ratio
    of the remainder term to the prefactor at ``delta = t**(-5/12)``.
    """
    if not epsilon0 > 0:
        raise DomainError("epsilon0 must be > 0")
    t = p.t
    delta = t ** (-5 / 12)
    eps = _growth_epsilon(p)
    log_ratio = -11 / 192 * p.g ** (-p.k) * t * delta * delta - log_prefactor(p)
    return GrowthParams(
        epsilon0=epsilon0, epsilon=eps, delta=delta,
        growth_ok=bool(eps > epsilon0 and p.k >= 3),
        log10_remainder_ratio=log_ratio * LOG10_E,
        remainder_small=log_ratio < 0,
    )
