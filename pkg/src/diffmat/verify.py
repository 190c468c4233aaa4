"""Self-check suites run by ``diffmat verify``.

Each suite returns a :class:`SuiteResult` holding named checks with a
pass flag and a small summary value.  Random inputs come from a Philox
generator seeded by the suite seed, so a failing run can be replayed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import complex_power_bounds, gaussian_sandwich, taylor_bounds_check
from .charfn import apply_sqrt, apply_m, check_sqrt_block, det_m, exact_moments, phi
from .errors import IntegrityError
from .exact import count_brute, count_dft
from .lattice import enumerate_lambda0, lambda_membership, lambda0_size, structure_defects
from .params import make_params

SLACK = 1e-15


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass
class SuiteResult:
    name: str
    checks: dict = field(default_factory=dict)

    def add(self, label: str, ok: bool, value=None):
        self.checks[label] = {"ok": bool(ok), "value": value}

    @property
    def passed(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c["ok"]]


def verify_moments(seed: int = 0, n_theta: int = 100) -> SuiteResult:
    res = SuiteResult("moments")
    worst = 0.0
    for g in range(2, 6):
        for k in range(2, 6):
            worst = max(worst, det_m(make_params(g, k, 1)).rel_error)
    res.add("det_m_closed_form", worst <= 1e-10, worst)
    for g, k in ((2, 4), (3, 3)):
        p = make_params(g, k, 1)
        rng = rng_for(seed, g, k)
        m1_ok, m2 = True, 0.0
        for _ in range(n_theta):
            mo = exact_moments(p, rng.uniform(-np.pi, np.pi, p.d))
            m1_ok &= mo.m1 == 0
            m2 = max(m2, mo.m2_match)
        res.add(f"first_moment_zero[{g},{k}]", m1_ok)
        res.add(f"second_moment[{g},{k}]", m2 <= 1e-12, m2)
        th = rng.uniform(-1, 1, (n_theta, p.d))
        err = float(np.abs(apply_sqrt(p, apply_sqrt(p, th)) - apply_m(p, th)).max())
        res.add(f"sqrt_squares_to_m[{g},{k}]", err <= 1e-10, err)
    sq = max(check_sqrt_block(g) for g in range(2, 9))
    res.add("sqrt_block_residual", sq <= 1e-12, sq)
    return res


def verify_lattice(seed: int = 0, n_zeta: int = 20) -> SuiteResult:
    res = SuiteResult("lattice")
    for g, k in ((2, 3), (2, 4), (3, 3), (3, 4), (5, 3)):
        p = make_params(g, k, 1)
        pts = enumerate_lambda0(p)
        res.add(f"lambda0_size[{g},{k}]", len(pts) == lambda0_size(p), len(pts))
        res.add(f"lambda0_membership[{g},{k}]", bool(np.all(lambda_membership(p, pts))))
        hom = max(structure_defects(p, e).hom_defect for e in pts)
        row = max(structure_defects(p, e).row_defect for e in pts)
        res.add(f"structure_defects[{g},{k}]", hom <= 1e-9 and row <= 1e-9, max(hom, row))
    p = make_params(3, 3, 1)
    rng = rng_for(seed, 3, 3)
    worst = 0.0
    for eta in enumerate_lambda0(p):
        zeta = rng.uniform(-np.pi, np.pi, (n_zeta, p.d))
        worst = max(worst, float(np.abs(phi(p, eta + zeta) - phi(p, eta) * phi(p, zeta)).max()))
    res.add("multiplicativity[3,3]", worst <= 1e-12, worst)
    return res


def gaussian_int_pow(re: int, im: int, t: int) -> tuple[int, int]:
    """``(re + i im)**t`` in exact integer arithmetic."""
    ar, ai, rr, ri = re, im, 1, 0
    while t:
        if t & 1:
            rr, ri = rr * ar - ri * ai, rr * ai + ri * ar
        ar, ai = ar * ar - ai * ai, 2 * ar * ai
        t >>= 1
    return rr, ri


def exact_real_power(z: complex, t: int) -> float:
    """Correctly rounded ``Re(z**t)`` for a complex of two finite floats."""
    nr, dr = z.real.as_integer_ratio()
    ni, di = z.imag.as_integer_ratio()
    den = max(dr, di)  # both powers of two
    re, _ = gaussian_int_pow(nr * (den // dr), ni * (den // di), t)
    return re / den**t  # int true division rounds correctly


def complex_power_violations(z_re, z_im, ts) -> np.ndarray:
    """Relative excess of ``Re(z**t)`` outside its bounds, scaled by ``|z|**t``."""
    out = np.empty(len(ts))
    for n, (a, b, t) in enumerate(zip(z_re, z_im, ts)):
        z = complex(a, b)
        t = int(t)
        pb = complex_power_bounds(z, t)
        scale = abs(z) ** t
        val = (z**t).real
        # float z**t is good to ~t ulp of |z|**t; only near-ties need the exact path
        if min(val - pb.lower, pb.upper - val) / scale < 1e-12:
            val = exact_real_power(z, t)
        out[n] = max(val - pb.upper, pb.lower - val) / scale
    return out


def sample_complex_power(rng: np.random.Generator, n: int):
    """Random ``(z, t)`` satisfying the preconditions of the power bounds."""
    t = rng.integers(2, 201, n)
    re = rng.uniform(0.3, 1.0, n)
    # |beta| up to the alpha > 0 limit, log-uniform to reach the tight regime.
    lim = 1 / np.sqrt(t * (t - 1) / 2)
    frac = np.where(rng.random(n) < 0.5, rng.random(n), 10 ** rng.uniform(-8, 0, n))
    beta = rng.choice([-1.0, 1.0], n) * frac * lim * (1 - 1e-9)
    return re, beta * re, t


def verify_inequalities(seed: int = 0, n: int = 100_000) -> SuiteResult:
    res = SuiteResult("inequalities")
    rng = rng_for(seed, 12)
    a = rng.uniform(0, 10, n)
    b = rng.uniform(-10, 10, n)
    j = rng.integers(1, 4, n)
    da, db = taylor_bounds_check(a, b, j)
    worst = float(max(da.max(), db.max()))
    res.add("taylor", worst <= SLACK, worst)
    zr, zi, t = sample_complex_power(rng, n)
    cp = float(complex_power_violations(zr, zi, t).max())
    res.add("complex_power", cp <= SLACK, cp)
    rho = np.concatenate([rng.uniform(0, 10, n // 2), 10 ** rng.uniform(-6, 1, n - n // 2)])
    rho = rho[rho > 0]
    s = gaussian_sandwich(rho)
    gs = float(max((s.lower - s.mid).max(), (s.mid - s.upper).max()))
    res.add("gaussian_sandwich", gs <= SLACK, gs)
    return res


COUNT_CASES = ((2, 2, 1), (2, 2, 2), (2, 3, 2), (2, 3, 4), (3, 3, 1))
PARITY_CASES = ((2, 3, 1), (2, 3, 3), (4, 3, 1), (6, 3, 1), (8, 3, 1))


def verify_counts(seed: int = 0) -> SuiteResult:
    del seed  # deterministic suite
    res = SuiteResult("counts")
    for case in COUNT_CASES + PARITY_CASES:
        p = make_params(*case)
        try:
            b, d = count_brute(p), count_dft(p).count
        except IntegrityError as exc:
            res.add(f"brute_eq_dft{case}", False, str(exc))
            continue
        expect_zero = case in PARITY_CASES
        res.add(f"brute_eq_dft{case}", b == d and (b == 0) == expect_zero, str(b))
    return res


SUITES = {
    "moments": verify_moments,
    "lattice": verify_lattice,
    "inequalities": verify_inequalities,
    "counts": verify_counts,
}


def run_suites(names, seed: int = 0) -> list[SuiteResult]:
    return [SUITES[n](seed) for n in names]
