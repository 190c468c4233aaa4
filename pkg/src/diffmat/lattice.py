"""Frequencies where the characteristic function has modulus one.

``Lambda`` is the set of ``theta`` for which ``theta . Z(x)`` is the same
modulo ``2*pi`` for every column ``x``.  Its points in ``[-pi, pi)^d`` form
a group ``Lambda0`` of order ``g**C(k-1,2)``, generated by the building
blocks ``alpha[i,j]`` for ``1 <= i < j < k``.  Every point of the torus
is classified as lying in a box around a ``Lambda0`` point, in a box around
another point of the coarse grid ``(2*pi/g) Z^d`` (region ``RA``), or
elsewhere (region ``RB``).

Lattice points are handled in integer units of ``2*pi/g`` wherever
possible, so membership and decomposition of grid points are exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .charfn import dist_2pi, wrap
from .errors import BudgetError, DomainError
from .params import Params, flat_index
from .walk import increment_matrix

#: Default tolerance for distances modulo ``2*pi``.
TOL = 1e-9
LAMBDA0_BUDGET = 1 << 20


def block_pairs(p: Params) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` with ``i < j < k`` indexing the building blocks."""
    return [(i, j) for i, j in p.pairs if j < p.k]


def building_block_units(p: Params, i: int, j: int) -> np.ndarray:
    """Building block ``alpha[i,j]`` in units of ``2*pi/g`` (entries in 0..g-1)."""
    if not 1 <= i < j < p.k:
        raise DomainError(f"building blocks need 1 <= i < j < k={p.k}, got ({i}, {j})")
    u = np.zeros(p.d, dtype=np.int64)
    for n in range(1, p.g):
        u[flat_index(p, (i, j), n)] = n
        u[flat_index(p, (i, p.k), n)] = p.g - n
        u[flat_index(p, (j, p.k), n)] = n
    return u


def building_block(p: Params, i: int, j: int) -> np.ndarray:
    """``alpha[i,j]`` as a real vector (unreduced, entries in ``[0, 2*pi)``)."""
    return 2 * np.pi / p.g * building_block_units(p, i, j)


def _centered(p: Params, units: np.ndarray) -> np.ndarray:
    """Map residues mod g to representatives whose angle lies in [-pi, pi)."""
    u = np.asarray(units) % p.g
    return np.where(2 * u >= p.g, u - p.g, u)


def lattice_units(p: Params, coeffs) -> np.ndarray:
    """``sum c[i,j] alpha[i,j]`` in units of ``2*pi/g``, reduced mod g."""
    coeffs = _coeff_vector(p, coeffs)
    out = np.zeros(p.d, dtype=np.int64)
    for c, (i, j) in zip(coeffs, block_pairs(p)):
        if c:
            out += c * building_block_units(p, i, j)
    return out % p.g


def _coeff_vector(p: Params, coeffs) -> list[int]:
    pairs = block_pairs(p)
    if isinstance(coeffs, dict):
        bad = set(coeffs) - set(pairs)
        if bad:
            raise DomainError(f"coefficients given for invalid pairs {sorted(bad)}")
        vec = [int(coeffs.get(pr, 0)) for pr in pairs]
    else:
        vec = [int(c) for c in coeffs]
        if len(vec) != len(pairs):
            raise DomainError(f"expected {len(pairs)} coefficients, got {len(vec)}")
    if any(not 0 <= c < p.g for c in vec):
        raise DomainError(f"coefficients must lie in 0..{p.g - 1}")
    return vec


def expand_lattice(p: Params, coeffs) -> np.ndarray:
    """Point of ``Lambda0`` with the given coefficients, reduced into ``[-pi, pi)``."""
    return 2 * np.pi / p.g * _centered(p, lattice_units(p, coeffs))


def decompose_lattice(p: Params, theta, tol: float = TOL) -> dict[tuple[int, int], int]:
    """Recover the unique coefficients of a ``Lambda0`` point.

    The coefficient of ``alpha[i,j]`` is read off the ``((i,j),1)`` coordinate,
    the only coordinate to which that building block alone contributes.
    """
    theta = np.asarray(theta, dtype=float)
    if not lambda_membership(p, theta, tol):
        raise DomainError("theta is not in Lambda")
    out = {}
    for i, j in block_pairs(p):
        v = theta[flat_index(p, (i, j), 1)] * p.g / (2 * np.pi)
        out[(i, j)] = int(round(v)) % p.g
    return out


def enumerate_lambda0(p: Params, budget: int = LAMBDA0_BUDGET) -> np.ndarray:
    """All ``g**C(k-1,2)`` points of ``Lambda0`` as rows of an array."""
    return 2 * np.pi / p.g * _centered(p, lambda0_units(p, budget))


def lambda0_units(p: Params, budget: int = LAMBDA0_BUDGET) -> np.ndarray:
    pairs = block_pairs(p)
    size = p.g ** len(pairs)
    if size > budget:
        raise BudgetError(f"|Lambda0| = {size} exceeds budget {budget}")
    if not pairs:
        return np.zeros((1, p.d), dtype=np.int64)
    gens = np.array([building_block_units(p, i, j) for i, j in pairs])
    coeffs = np.array(list(itertools.product(range(p.g), repeat=len(pairs))), dtype=np.int64)
    return (coeffs @ gens) % p.g


def lambda0_coefficients(p: Params) -> list[tuple[int, ...]]:
    """Coefficient tuples in the same order as :func:`enumerate_lambda0`."""
    return list(itertools.product(range(p.g), repeat=len(block_pairs(p))))


def _phase_spread(p: Params, theta: np.ndarray) -> np.ndarray:
    """Distance of ``theta.Z(x) - theta.Z(0)`` from ``2*pi*Z`` per column."""
    V = increment_matrix(p, normalized=True)
    dV = (V - V[0]).astype(float)  # row 0 is the all-zero column
    return dist_2pi(theta @ dV.T / p.g)


def lambda_membership(p: Params, theta, tol: float = TOL) -> bool | np.ndarray:
    """Whether ``theta`` lies in ``Lambda`` (vectorised over leading axes).

    Comparing every column with the zero column suffices: congruence to a
    common reference is congruence for every pair of columns.
    """
    theta = np.asarray(theta, dtype=float)
    ok = (_phase_spread(p, theta.reshape(-1, p.d)) <= tol).all(axis=1)
    return bool(ok[0]) if theta.ndim == 1 else ok.reshape(theta.shape[:-1])


def units_in_lambda(p: Params, units) -> np.ndarray:
    """Exact membership of grid points given in units of ``2*pi/g``.

    ``(2*pi/g) m . Z(x)`` differs between columns by ``(2*pi/g**2) m.(V(x)-V(0))``,
    so membership is the integer condition ``m.(V(x)-V(0)) == 0 (mod g**2)``.
    """
    m = np.atleast_2d(np.asarray(units, dtype=np.int64))
    V = increment_matrix(p, normalized=True)
    dV = V - V[0]
    return ((m @ dV.T) % (p.g * p.g) == 0).all(axis=1)


@dataclass(frozen=True)
class Region:
    kind: str  # "primary", "RA" or "RB"
    coeffs: tuple[int, ...] | None = None

    def __str__(self):
        return f"primary{self.coeffs}" if self.kind == "primary" else self.kind


def _check_delta(p: Params, delta: float):
    if not 0 < delta < np.pi / p.g:
        raise DomainError(f"delta must lie in (0, pi/g) = (0, {np.pi / p.g:.6g}), got {delta}")


def classify_many(p: Params, theta, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised region classification.

    Returns ``(kind, units)`` where ``kind`` is an int array (0 primary,
    1 RA, 2 RB) and ``units`` holds the nearest coarse grid point in units
    of ``2*pi/g`` (meaningful for kinds 0 and 1).
    """
    _check_delta(p, delta)
    th = wrap(np.asarray(theta, dtype=float).reshape(-1, p.d))
    step = 2 * np.pi / p.g
    m = np.round(th / step).astype(np.int64)
    near = (np.abs(th - m * step) < delta).all(axis=1)
    units = m % p.g
    kind = np.full(th.shape[0], 2, dtype=np.int8)
    if near.any():
        member = units_in_lambda(p, units[near])
        kind[np.nonzero(near)[0]] = np.where(member, 0, 1)
    return kind, units


def classify_region(p: Params, theta, delta: float) -> Region:
    """Which part of the torus decomposition ``theta`` falls into."""
    kind, units = classify_many(p, theta, delta)
    if kind[0] == 2:
        return Region("RB")
    if kind[0] == 1:
        return Region("RA")
    coeffs = tuple(int(units[0, flat_index(p, pr, 1)]) for pr in block_pairs(p))
    return Region("primary", coeffs)


@dataclass(frozen=True)
class Defects:
    hom_defect: float
    row_defect: float


def structure_defects(p: Params, theta) -> Defects:
    """Residuals of the two linear relations every point of ``Lambda`` obeys.

    ``hom_defect`` measures ``theta[pr,a] + theta[pr,b] - theta[pr,a+b]``
    modulo ``2*pi`` (with ``theta[pr,0] = 0``); ``row_defect`` measures the
    per-row sum ``sum_{m<i} theta[{m,i},-a] + sum_{m>i} theta[{i,m},a]``.
    """
    theta = np.asarray(theta, dtype=float)
    g = p.g
    full = np.zeros((p.n_pairs, g))
    full[:, 1:] = theta.reshape(p.n_pairs, g - 1)
    a = np.arange(g)
    hom = full[:, a[:, None]] + full[:, a[None, :]] - full[:, (a[:, None] + a[None, :]) % g]
    hom_defect = float(dist_2pi(hom).max()) if hom.size else 0.0
    row_defect = 0.0
    for i in range(1, p.k + 1):
        for r in range(1, g):
            s = 0.0
            for m in range(1, p.k + 1):
                if m < i:
                    s += full[p.pair_rank((m, i)), (-r) % g]
                elif m > i:
                    s += full[p.pair_rank((i, m)), r]
            row_defect = max(row_defect, float(dist_2pi(s)))
    return Defects(hom_defect, row_defect)


def coarse_grid_size(p: Params) -> int:
    """Number of points of the coarse grid ``L``."""
    return p.g**p.d


def lambda0_size(p: Params) -> int:
    return p.g ** math.comb(p.k - 1, 2)
