"""Exact counts of (g, k; lambda)-difference matrices over Z_g.

Two independent routes:

* :func:`count_brute` enumerates multiplicity vectors over normalized
  columns (first entry 0) that satisfy the balance condition, weighting each
  by the multinomial number of column orders and by ``g**t`` translations.
* :func:`count_dft` evaluates the Fourier inversion sum of the walk exactly on
  a finite grid of frequencies and rounds the result.

Counts are Python integers and never pass through floating point except in
the DFT route, which is guarded by a rounding-residual check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charfn import phi
from .errors import BudgetError, IntegrityError
from .lattice import block_pairs, lambda0_units
from .params import Params
from .walk import column_array

#: Search-tree nodes the multiplicity enumeration may visit.
BRUTE_BUDGET = 10_000_000
#: Grid points times columns the DFT route may evaluate.
DFT_BUDGET = 200_000_000
DFT_BLOCK = 1 << 15


def parity_obstruction(p: Params) -> bool:
    """True iff g is even, lambda odd and k >= 3; then no matrix exists."""
    return p.parity_obstructed


def _slots(p: Params) -> list[list[int]]:
    """For each normalized column, the (pair, difference) slots it fills."""
    cols = column_array(p, normalized=True)
    out = []
    for x in cols.tolist():
        out.append([r * p.g + (x[i - 1] - x[j - 1]) % p.g for r, (i, j) in enumerate(p.pairs)])
    return out


def balanced_multiplicities(p: Params, budget: int = BRUTE_BUDGET):
    """Yield every balanced multiplicity vector over the normalized columns.

    A vector ``m`` (one entry per normalized column, summing to ``t``) is
    balanced when each pair sees every difference exactly ``lambda`` times.
    The depth-first search prunes a branch as soon as a slot exceeds
    ``lambda`` or a slot can no longer be filled by the remaining columns.
    """
    slots = _slots(p)
    n, lam, t = len(slots), p.lam, p.t
    last_cover = {}
    for c, ss in enumerate(slots):
        for s in ss:
            last_cover[s] = c
    closing = [[] for _ in range(n)]
    for s, c in last_cover.items():
        closing[c].append(s)
    counts = [0] * (p.n_pairs * p.g)
    m = [0] * n
    visited = 0

    def rec(c: int, remaining: int):
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetError(f"multiplicity search exceeded {budget} nodes")
        if c == n:
            if remaining == 0:
                yield tuple(m)
            return
        ss = slots[c]
        cap = min([remaining] + [lam - counts[s] for s in ss])
        lo = 0 if c < n - 1 else remaining
        for v in range(lo, cap + 1):
            for s in ss:
                counts[s] += v
            if all(counts[s] == lam for s in closing[c]):
                m[c] = v
                yield from rec(c + 1, remaining - v)
            for s in ss:
                counts[s] -= v
        m[c] = 0

    yield from rec(0, t)


def _multinomial(t: int, parts) -> int:
    out = math.factorial(t)
    for v in parts:
        out //= math.factorial(v)
    return out


def count_normalized(p: Params, budget: int = BRUTE_BUDGET) -> int:
    """Number of difference matrices whose first row is zero."""
    return sum(_multinomial(p.t, m) for m in balanced_multiplicities(p, budget))


def count_brute(p: Params, budget: int = BRUTE_BUDGET) -> int:
    """Exact count by enumerating balanced multiplicity vectors."""
    return p.g**p.t * count_normalized(p, budget)


def count_closed_form_k2(p: Params) -> int:
    """For k = 2 the count is ``g**t * t! / (lambda!)**g``."""
    if p.k != 2:
        raise ValueError("closed form holds only for k = 2")
    return p.g**p.t * math.factorial(p.t) // math.factorial(p.lam) ** p.g


def count_closed_form_g2k3(p: Params) -> int:
    """For g = 2, k = 3 the only balanced vector is ``(lambda/2,)*4``."""
    if (p.g, p.k) != (2, 3):
        raise ValueError("closed form holds only for g = 2, k = 3")
    if p.lam % 2:
        return 0
    h = p.lam // 2
    return 2 ** (2 * p.lam) * math.factorial(2 * p.lam) // math.factorial(h) ** 4


def count_sequences(p: Params, budget: int = 1 << 24) -> int:
    """Count normalized matrices by checking every sequence of columns.

    Independent of the multiplicity machinery; only usable for tiny cases.
    The returned value is multiplied by ``g**t`` like :func:`count_brute`.
    """
    cols = column_array(p, normalized=True).tolist()
    total = len(cols) ** p.t
    if total > budget:
        raise BudgetError(f"{total} sequences exceed budget {budget}")
    good = 0
    for seq in itertools.product(cols, repeat=p.t):
        ok = True
        for i, j in p.pairs:
            diffs = [(x[i - 1] - x[j - 1]) % p.g for x in seq]
            if any(diffs.count(a) != p.lam for a in range(p.g)):
                ok = False
                break
        good += ok
    return p.g**p.t * good


def dft_modulus(p: Params) -> int:
    """Grid size per axis for the exact inversion sum.

    Each coordinate of ``X_t`` equals ``n - lambda`` with ``n`` in ``0..t``,
    so it lies in ``[-lambda, lambda*(g-1)]``; any modulus above
    ``lambda*(g-1)`` separates 0 from the rest.  Rounding up to a multiple
    of ``g`` puts every point of ``Lambda0`` on the grid.
    """
    n = p.lam * (p.g - 1) + 1
    return -(-n // p.g) * p.g


@dataclass(frozen=True)
class DFTResult:
    count: int
    raw: complex
    residual: float
    modulus: int
    lattice_factor: int
    evaluated: int


def _coset_representatives(p: Params, N: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start:stop`` of a transversal of the grid modulo ``Lambda0``.

    ``alpha[i,j]`` is the only generator touching coordinate ``((i,j),1)``,
    where it adds ``N/g`` grid steps; restricting those coordinates to
    ``0..N/g-1`` picks one point from every coset.
    """
    restricted = [p.block((i, j)).start for i, j in block_pairs(p)]
    radix = np.array([N // p.g if c in restricted else N for c in range(p.d)], dtype=np.int64)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, p.d), dtype=np.int64)
    for c in range(p.d - 1, -1, -1):
        idx, out[:, c] = np.divmod(idx, radix[c])
    return out


def count_dft(p: Params, budget: int = DFT_BUDGET) -> DFTResult:
    """Exact count from the discretised Fourier inversion formula.

    ``P(X_t = 0) = N**-d * sum_m Phi(2*pi*m/N)**t`` over ``m`` in ``Z_N^d``
    whenever ``N`` separates 0 from the other reachable positions.  Because
    ``Phi(eta + zeta) = Phi(eta) Phi(zeta)`` for ``eta`` in ``Lambda0`` and
    the grid contains ``Lambda0``, the grid sum factors as
    ``sum_eta Phi(eta)**t`` times a sum over coset representatives.  The
    first factor is an integer (every ``Phi(eta)**t`` is +1 or -1); when it
    vanishes the count is 0 without evaluating any coset.
    """
    N = dft_modulus(p)
    etas = 2 * np.pi / p.g * lambda0_units(p)
    factor_raw = complex(np.sum(phi(p, etas) ** p.t))
    factor = round(factor_raw.real)
    if abs(factor_raw - factor) > 1e-6:
        raise IntegrityError(f"lattice factor {factor_raw} is not an integer")
    n_reps = N**p.d // len(etas)
    n_cols = p.g ** (p.k - 1)
    if factor == 0:
        return DFTResult(0, 0j, 0.0, N, 0, len(etas))
    if n_reps * n_cols > budget:
        raise BudgetError(f"DFT needs {n_reps} grid points x {n_cols} columns, budget {budget}")
    total = 0j
    for s in range(0, n_reps, DFT_BLOCK):
        m = _coset_representatives(p, N, s, min(s + DFT_BLOCK, n_reps))
        total += np.sum(phi(p, 2 * np.pi / N * m) ** p.t)
    # count = g^(k t) * factor * total / N^d; scale in log space first.
    scale = math.exp(p.k * p.t * math.log(p.g) - p.d * math.log(N))
    raw = scale * factor * total
    count = round(raw.real)
    residual = abs(raw - count)
    if residual >= 0.25:
        raise IntegrityError(f"DFT rounding residual {residual:.3g} >= 0.25; use count_brute")
    return DFTResult(count, raw, residual, N, factor, n_reps + len(etas))


def count(p: Params, method: str = "auto") -> tuple[int, str]:
    """Exact count by the chosen method; ``auto`` tries brute force first."""
    if method == "brute":
        return count_brute(p), "brute"
    if method == "dft":
        return count_dft(p).count, "dft"
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        return count_brute(p), "brute"
    except BudgetError:
        return count_dft(p).count, "dft"


def exact_return_probability(p: Params, method: str = "auto") -> Fraction:
    """``P(X_t = 0) = count / g**(k t)`` as a reduced fraction."""
    c, _ = count(p, method)
    return Fraction(c, p.g ** (p.k * p.t))
