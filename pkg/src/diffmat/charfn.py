"""Characteristic function of one walk step and its second-moment matrix.

The covariance matrix ``M`` is block diagonal with ``C(k,2)`` copies of
``S = I/g - J/g**2`` (``J`` the all-ones matrix of size ``g-1``).  ``S`` has
eigenvalue ``1/g**2`` on the all-ones vector and ``1/g`` on its orthogonal
complement, which gives closed forms for its determinant, its symmetric
square root ``Q = a*I + b*J`` and the inverse of that root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .params import Params
from .walk import increment_matrix

#: Thetas evaluated per block in vectorised calls; bounds peak memory.
PHI_BLOCK = 1 << 14


def wrap(theta):
    """Reduce angles to the torus representative in ``[-pi, pi)``."""
    theta = np.asarray(theta, dtype=float)
    return (theta + np.pi) % (2 * np.pi) - np.pi


def dist_2pi(x):
    """Distance from ``x`` to the nearest multiple of ``2*pi``."""
    x = np.asarray(x, dtype=float)
    return np.abs(x - 2 * np.pi * np.round(x / (2 * np.pi)))


def phi(p: Params, theta) -> np.ndarray | complex:
    """Characteristic function ``E[exp(i theta . Z(x))]``.

    ``theta`` may be a single point of shape ``(d,)`` or a stack of shape
    ``(..., d)``.  The average runs over normalized columns, which by
    translation invariance equals the average over all ``g**k`` columns.
    """
    theta = np.asarray(theta, dtype=float)
    V = increment_matrix(p, normalized=True)
    if theta.ndim == 1:
        return complex(np.exp(1j * (V @ theta) / p.g).mean())
    flat = theta.reshape(-1, p.d)
    out = np.empty(flat.shape[0], dtype=complex)
    Vt = V.T.astype(float) / p.g
    for s in range(0, flat.shape[0], PHI_BLOCK):
        out[s:s + PHI_BLOCK] = np.exp(1j * (flat[s:s + PHI_BLOCK] @ Vt)).mean(axis=1)
    return out.reshape(theta.shape[:-1])


def _blocks(p: Params, theta: np.ndarray) -> np.ndarray:
    return np.asarray(theta, dtype=float).reshape(theta.shape[:-1] + (p.n_pairs, p.g - 1))


def quad_form(p: Params, theta) -> np.ndarray | float:
    """``theta^T M theta`` evaluated block by block in closed form."""
    theta = np.asarray(theta, dtype=float)
    b = _blocks(p, theta)
    val = (b * b).sum(axis=-1) / p.g - b.sum(axis=-1) ** 2 / p.g**2
    out = val.sum(axis=-1)
    return float(out) if theta.ndim == 1 else out


def moment_block(g: int) -> np.ndarray:
    """Dense ``(g-1) x (g-1)`` block ``S`` of ``M``."""
    n = g - 1
    return np.eye(n) / g - np.ones((n, n)) / g**2


def moment_matrix(p: Params) -> np.ndarray:
    """Dense ``d x d`` matrix ``M``; meant for small cross-checks only."""
    return np.kron(np.eye(p.n_pairs), moment_block(p.g))


@dataclass(frozen=True)
class DetM:
    log_closed: float
    log_numeric: float

    @property
    def value(self) -> float:
        return math.exp(self.log_closed)

    @property
    def rel_error(self) -> float:
        return abs(math.expm1(self.log_numeric - self.log_closed))


def det_m(p: Params) -> DetM:
    """``det M = g**(-g C(k,2))`` in closed form and from block eigenvalues."""
    log_closed = -p.g * p.n_pairs * math.log(p.g)
    eig = np.linalg.eigvalsh(moment_block(p.g))
    return DetM(log_closed, p.n_pairs * float(np.log(eig).sum()))


@dataclass(frozen=True)
class Moments:
    m1: Fraction
    m2_match: float


def exact_moments(p: Params, theta) -> Moments:
    """First moment of ``theta . Z`` in exact rationals, second moment check.

    Float entries of ``theta`` are converted to their exact binary rational
    value, so the first-moment identity is tested without rounding.
    """
    q = [Fraction(v) for v in np.asarray(theta, dtype=object).ravel()]
    V = increment_matrix(p)
    total = Fraction(0)
    for row in V.tolist():
        total += sum((qc * vc for qc, vc in zip(q, row) if vc), Fraction(0))
    m1 = total / (p.g * V.shape[0])
    th = np.array([float(v) for v in q])
    m2 = float(np.mean((V @ th / p.g) ** 2))
    return Moments(m1, abs(m2 - quad_form(p, th)))


def sqrt_coeffs(g: int) -> tuple[float, float]:
    """``(a, b)`` with ``(a I + b J)**2 = S``, the SPD square root."""
    a = g**-0.5
    return a, (1 / g - a) / (g - 1)


def inv_sqrt_coeffs(g: int) -> tuple[float, float]:
    """``(a, c)`` with ``a I + c J`` the inverse of the square root of ``S``."""
    a = math.sqrt(g)
    return a, (g - a) / (g - 1)


def _apply_aj(p: Params, theta, a: float, b: float) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    blk = _blocks(p, theta)
    out = a * blk + b * blk.sum(axis=-1, keepdims=True)
    return out.reshape(theta.shape)


def apply_sqrt(p: Params, theta) -> np.ndarray:
    """Apply ``P``, the block diagonal symmetric square root of ``M``."""
    return _apply_aj(p, theta, *sqrt_coeffs(p.g))


def apply_inv_sqrt(p: Params, theta) -> np.ndarray:
    """Apply ``P**-1``."""
    return _apply_aj(p, theta, *inv_sqrt_coeffs(p.g))


def apply_m(p: Params, theta) -> np.ndarray:
    return _apply_aj(p, theta, 1 / p.g, -1 / p.g**2)


def sqrt_block(g: int) -> np.ndarray:
    a, b = sqrt_coeffs(g)
    return a * np.eye(g - 1) + b * np.ones((g - 1, g - 1))


def check_sqrt_block(g: int) -> float:
    """Max-norm residual ``|Q Q - S|``."""
    Q = sqrt_block(g)
    return float(np.abs(Q @ Q - moment_block(g)).max())
