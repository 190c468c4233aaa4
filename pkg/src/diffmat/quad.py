"""Tensor midpoint quadrature over boxes of the torus.

Used to check numerically that the box integral of ``Phi**t`` sits inside
the two-sided local-limit bounds, and that the pointwise estimates on
``Phi`` near the origin hold.  Integrands are smooth on a box, so a plain
midpoint rule with an empirical refinement margin is enough.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import box_constants, lu_factors, prefactor_exponent
from .charfn import phi, quad_form, wrap
from .errors import BudgetError, DomainError
from .lattice import classify_many, units_in_lambda
from .params import Params

GRID_BUDGET = 1 << 24
GRID_BLOCK = 1 << 15


@dataclass(frozen=True)
class QuadratureSpec:
    grid_per_axis: int
    delta: float
    t: int
    budget: int = GRID_BUDGET

    def __post_init__(self):
        if self.grid_per_axis < 3 or self.grid_per_axis % 2 == 0:
            raise DomainError("grid_per_axis must be an odd integer >= 3")
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if self.t < 0:
            raise DomainError("t must be >= 0")

    def coarser(self) -> "QuadratureSpec":
        n = max(3, (self.grid_per_axis // 2) | 1)
        return QuadratureSpec(n, self.delta, self.t, self.budget)


def _nodes(n: int, delta: float) -> np.ndarray:
    return delta * (-1 + (2 * np.arange(n) + 1) / n)


def _grid_blocks(d: int, nodes: np.ndarray, budget: int):
    n = nodes.size
    total = n**d
    if total > budget:
        raise BudgetError(f"{n}^{d} = {total} grid points exceed budget {budget}")
    for s in range(0, total, GRID_BLOCK):
        idx = np.arange(s, min(s + GRID_BLOCK, total))
        pts = np.empty((idx.size, d))
        for c in range(d - 1, -1, -1):
            idx, r = np.divmod(idx, n)
            pts[:, c] = nodes[r]
        yield pts


def integrate_box_phi(p: Params, spec: QuadratureSpec, center=None) -> complex:
    """Midpoint approximation of ``int_{B_delta(center)} Phi**t``.

    ``center`` defaults to the origin; ``spec.t`` is the power.
    """
    nodes = _nodes(spec.grid_per_axis, spec.delta)
    c = np.zeros(p.d) if center is None else np.asarray(center, dtype=float)
    total = 0j
    for pts in _grid_blocks(p.d, nodes, spec.budget):
        total += np.sum(phi(p, pts + c) ** spec.t)
    return complex(total * (2 * spec.delta / spec.grid_per_axis) ** p.d)


def integrate_box_gaussian(p: Params, spec: QuadratureSpec) -> float:
    """Midpoint approximation of ``int_{B_delta(0)} exp(-(t/2) theta^T M theta)``."""
    nodes = _nodes(spec.grid_per_axis, spec.delta)
    total = 0.0
    for pts in _grid_blocks(p.d, nodes, spec.budget):
        total += float(np.sum(np.exp(-spec.t / 2 * quad_form(p, pts))))
    return total * (2 * spec.delta / spec.grid_per_axis) ** p.d


def gaussian_box_bounds(p: Params, delta: float, t: int) -> tuple[float, float]:
    """Closed-form lower/upper bounds on the Gaussian box integral."""
    D1, D2 = box_constants(p.g)
    base = (p.d / 2) * math.log(2 * math.pi / t) + float(prefactor_exponent(p.g, p.k) - math.comb(p.k - 1, 2)) * math.log(p.g)
    lo = math.exp(base) * (-math.expm1(-t / 2 * (D1 * delta) ** 2)) ** (p.d / 2)
    hi = math.exp(base) * (-math.expm1(-t * (D2 * delta) ** 2)) ** (p.d / 2)
    return lo, hi


def gaussian_full_mass(p: Params, t: int) -> float:
    """``(2 pi / t)**(d/2) det(M)**(-1/2)``, the integral over all of R^d."""
    return math.exp(p.d / 2 * math.log(2 * math.pi / t) + p.g * p.n_pairs / 2 * math.log(p.g))


def torus_return_probability(p: Params, n_per_axis: int, budget: int = GRID_BUDGET) -> float:
    """``(2 pi)**-d int Phi**t`` over the whole torus via an equispaced grid.

    Exact (up to rounding) when ``n_per_axis`` exceeds the spread of every
    coordinate of ``X_t``, as on the grid of the DFT counter.
    """
    nodes = 2 * np.pi * np.arange(n_per_axis) / n_per_axis
    total = 0j
    for pts in _grid_blocks(p.d, nodes, budget):
        total += np.sum(phi(p, pts) ** p.t)
    return float((total / n_per_axis**p.d).real)


@dataclass
class SandwichReport:
    delta: float
    t: int
    integral: float
    integral_margin: float
    lower_target: float
    upper_target: float
    integral_ok: bool
    points_checked: int = 0
    real_violations: int = 0
    imag_violations: int = 0
    lower_violations: int = 0
    max_eps_ratio: float = 0.0
    max_imag_ratio: float = 0.0
    min_real: float = 1.0
    offenders: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return self.real_violations + self.imag_violations + self.lower_violations + (not self.integral_ok)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def pointwise_check(p: Params, theta: np.ndarray, delta: float, report: SandwichReport):
    """Check the three primary-box estimates on ``Phi`` at every row of ``theta``.

    ``eps(theta) = Re Phi / exp(-theta^T M theta / 2) - 1`` must be at most
    ``(d delta)**4 exp((d delta)**2 / 2) / 6`` in modulus, ``|Im Phi|`` at
    most ``(d delta)**3 / 6``, and ``Re Phi > 1/3`` when ``d delta < 1``.
    """
    x = p.d * delta
    eps_bound = x**4 * math.exp(x * x / 2) / 6
    imag_bound = x**3 / 6
    ph = phi(p, theta)
    eps = ph.real / np.exp(-quad_form(p, theta) / 2) - 1
    bad_r = np.abs(eps) > eps_bound
    bad_i = np.abs(ph.imag) > imag_bound
    bad_l = (ph.real <= 1 / 3) if x < 1 else np.zeros(len(ph), bool)
    report.points_checked += len(ph)
    report.real_violations += int(bad_r.sum())
    report.imag_violations += int(bad_i.sum())
    report.lower_violations += int(bad_l.sum())
    if eps_bound > 0:
        report.max_eps_ratio = max(report.max_eps_ratio, float(np.abs(eps).max() / eps_bound))
    if imag_bound > 0:
        report.max_imag_ratio = max(report.max_imag_ratio, float(np.abs(ph.imag).max() / imag_bound))
    report.min_real = min(report.min_real, float(ph.real.min()))
    for row in np.nonzero(bad_r | bad_i | bad_l)[0][:5]:
        report.offenders.append(theta[row].tolist())


def sandwich_report(p: Params, spec: QuadratureSpec, samples: int = 0, seed: int = 0) -> SandwichReport:
    """Numerical check of the local-limit sandwich on ``B_delta(0)``.

    The integral ``(2 pi)**-d int_{B_delta(0)} Phi**t`` is compared with
    ``L g**((g/2)C(k,2)) (2 pi t)**(-d/2)`` and the matching ``U`` bound,
    allowing the difference between the midpoint rule at this grid and at a
    coarser one as quadrature error.  Pointwise estimates are checked on the
    grid and on ``samples`` extra uniform points of the box.
    """
    t = spec.t
    fine = integrate_box_phi(p, spec)
    coarse = integrate_box_phi(p, spec.coarser())
    scale = (2 * math.pi) ** (-p.d)
    integral = fine.real * scale
    margin = abs(fine - coarse) * scale + abs(fine.imag) * scale
    lu = lu_factors(p, spec.delta, t)
    base = math.exp(p.g / 2 * p.n_pairs * math.log(p.g) - p.d / 2 * math.log(2 * math.pi * t))
    lo, hi = lu.L * base, lu.U * base
    rep = SandwichReport(
        delta=spec.delta, t=t, integral=integral, integral_margin=margin,
        lower_target=lo, upper_target=hi,
        integral_ok=bool(lo <= integral + margin and integral - margin <= hi),
    )
    nodes = _nodes(spec.grid_per_axis, spec.delta)
    for pts in _grid_blocks(p.d, nodes, spec.budget):
        pointwise_check(p, pts, spec.delta, rep)
    if samples:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        for s in range(0, samples, GRID_BLOCK):
            n = min(GRID_BLOCK, samples - s)
            pointwise_check(p, rng.uniform(-spec.delta, spec.delta, (n, p.d)), spec.delta, rep)
    return rep


@dataclass(frozen=True)
class RemainderCheck:
    region: str
    checked: int
    violations: int
    bound: float
    max_abs_phi: float


def remainder_a_bound(p: Params) -> float:
    return 1 - 0.1 * p.g ** (-p.k - 2)


def remainder_b_bound(p: Params, delta: float) -> float:
    return 1 - 11 / 48 * p.g ** (-p.k) * (delta / 2) ** 2


def sample_region_a(p: Params, delta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of boxes around coarse-grid points outside ``Lambda0``."""
    out = []
    while sum(len(o) for o in out) < n:
        units = rng.integers(0, p.g, size=(2 * n, p.d))
        units = units[~units_in_lambda(p, units)]
        zeta = rng.uniform(-delta, delta, size=units.shape) * (1 - 1e-12)
        out.append(wrap(2 * np.pi / p.g * units + zeta))
    return np.vstack(out)[:n]


def sample_region_b(p: Params, delta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Half uniform torus points, half points just outside coarse-grid boxes."""
    n_near = n // 2
    uni = rng.uniform(-np.pi, np.pi, size=(n - n_near, p.d))
    units = rng.integers(0, p.g, size=(n_near, p.d))
    zeta = rng.uniform(-delta, delta, size=units.shape)
    col = rng.integers(0, p.d, size=n_near)
    sign = rng.choice([-1.0, 1.0], size=n_near)
    zeta[np.arange(n_near), col] = sign * rng.uniform(delta * (1 + 1e-9), 2 * delta, size=n_near)
    near = wrap(2 * np.pi / p.g * units + zeta)
    return np.vstack([uni, near])


def remainder_checks(p: Params, delta: float, n: int, seed: int = 0) -> tuple[RemainderCheck, RemainderCheck]:
    """Spot-check the modulus bounds on ``Phi`` in regions ``RA`` and ``RB``.

    Samples are drawn per region, then confirmed by the classifier; only
    confirmed points count.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    out = []
    for name, sampler, bound, code in (
        ("RA", sample_region_a, remainder_a_bound(p), 1),
        ("RB", sample_region_b, remainder_b_bound(p, delta), 2),
    ):
        pts = sampler(p, delta, n, rng)
        kind, _ = classify_many(p, pts, delta)
        pts = pts[kind == code]
        mod = np.abs(phi(p, pts))
        out.append(RemainderCheck(name, len(pts), int((mod > bound).sum()), bound, float(mod.max(initial=0))))
    return out[0], out[1]


def decomposition_check(p: Params, grid_per_axis: int = 33, shrink: float = 1e-9) -> dict:
    """Numerically reassemble ``P(X_t = 0)`` from box integrals.

    With ``delta`` just below ``pi/g`` the boxes around the ``g**d`` coarse
    grid points tile the torus.  The ``Lambda0`` boxes are folded into one
    box at the origin with multiplicity ``|Lambda0|`` (or 0 in the parity
    case); the rest form the remainder integral.
    """
    delta = math.pi / p.g * (1 - shrink)
    spec = QuadratureSpec(grid_per_axis, delta, p.t)
    if p.g**p.d > 4096:
        raise BudgetError("coarse grid too large for the decomposition check")
    units = np.array(list(itertools.product(range(p.g), repeat=p.d)), dtype=np.int64)
    member = units_in_lambda(p, units)
    remainder = 0j
    for u in units[~member]:
        remainder += integrate_box_phi(p, spec, center=2 * np.pi / p.g * u)
    box0 = integrate_box_phi(p, spec)
    mult = 0 if p.parity_flag else int(member.sum())
    scale = (2 * math.pi) ** (-p.d)
    return {
        "primary": (mult * box0 * scale).real,
        "remainder": (remainder * scale).real,
        "total": ((mult * box0 + remainder) * scale).real,
        "lambda0_size": int(member.sum()),
    }
