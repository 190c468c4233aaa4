"""The column embedding and the lattice random walk built from it.

A column ``x`` in ``(Z_g)^k`` is embedded as an integer increment
``V(x) = g * Z(x)`` whose ``((i, j), a)`` coordinate is ``g - 1`` when
``x_i - x_j == a (mod g)`` and ``-1`` otherwise.  Keeping the factor ``g``
makes every partial sum an exact integer, so a return to the origin is an
exact equality test.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetError, DomainError
from .params import Params

#: Largest number of columns any enumeration will materialise.
COLUMN_BUDGET = 1 << 22
#: Walks per reproducible substream; the partition does not depend on the
#: worker count, so results are bit-identical for any number of workers.
MC_CHUNK = 1 << 15


def default_workers() -> int:
    env = os.environ.get("DIFFMAT_WORKERS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _check_columns(p: Params, normalized: bool, budget: int | None) -> int:
    n = p.g ** (p.k - 1 if normalized else p.k)
    budget = COLUMN_BUDGET if budget is None else budget
    if n > budget:
        raise BudgetError(f"{n} columns exceed the enumeration budget {budget}")
    return n


def enumerate_columns(p: Params, normalized: bool = False, budget: int | None = None):
    """Yield columns as tuples in lexicographic order.

    With ``normalized`` only the ``g**(k-1)`` columns whose first entry is 0
    are produced.
    """
    _check_columns(p, normalized, budget)
    if normalized:
        for rest in itertools.product(range(p.g), repeat=p.k - 1):
            yield (0,) + rest
    else:
        yield from itertools.product(range(p.g), repeat=p.k)


def z_map(p: Params, x) -> np.ndarray:
    """Exact increment ``V = g * Z(x)`` of a single column."""
    x = np.asarray(x, dtype=np.int64) % p.g
    return _increments_of(p.g, p.k, x[None, :])[0]


def _increments_of(g: int, k: int, cols: np.ndarray) -> np.ndarray:
    pairs = list(itertools.combinations(range(k), 2))
    out = np.full((cols.shape[0], len(pairs) * (g - 1)), -1, dtype=np.int64)
    for r, (i, j) in enumerate(pairs):
        diff = (cols[:, i] - cols[:, j]) % g
        hit = diff != 0
        rows = np.nonzero(hit)[0]
        out[rows, r * (g - 1) + diff[hit] - 1] = g - 1
    return out


@lru_cache(maxsize=64)
def _column_table(g: int, k: int, normalized: bool) -> np.ndarray:
    n_free = k - 1 if normalized else k
    grid = np.indices((g,) * n_free).reshape(n_free, -1).T
    if normalized:
        grid = np.hstack([np.zeros((grid.shape[0], 1), dtype=grid.dtype), grid])
    cols = grid.astype(np.int64)
    cols.setflags(write=False)
    return cols


@lru_cache(maxsize=64)
def _increment_table(g: int, k: int, normalized: bool) -> np.ndarray:
    out = _increments_of(g, k, _column_table(g, k, normalized))
    out.setflags(write=False)
    return out


def column_array(p: Params, normalized: bool = False, budget: int | None = None) -> np.ndarray:
    """All columns as an ``(n, k)`` array, same order as :func:`enumerate_columns`."""
    _check_columns(p, normalized, budget)
    return _column_table(p.g, p.k, normalized)


def increment_matrix(p: Params, normalized: bool = False, budget: int | None = None) -> np.ndarray:
    """Increments of every column as an ``(n, d)`` read-only integer array.

    Z is invariant under adding a constant to every entry, so the normalized
    table lists each distinct increment exactly once while the full table
    lists each one ``g`` times.
    """
    _check_columns(p, normalized, budget)
    return _increment_table(p.g, p.k, normalized)


@dataclass(frozen=True)
class WalkPosition:
    v_sum: np.ndarray
    steps: int
    g: int

    @property
    def position(self) -> np.ndarray:
        """Position ``X_t = v_sum / g`` as floats."""
        return self.v_sum / self.g

    def at_origin(self) -> bool:
        return not np.any(self.v_sum)


def walk(p: Params, columns) -> WalkPosition:
    """Sum the increments of an explicit sequence of columns."""
    cols = np.asarray(columns, dtype=np.int64).reshape(-1, p.k) % p.g
    v = _increments_of(p.g, p.k, cols).sum(axis=0) if len(cols) else np.zeros(p.d, np.int64)
    return WalkPosition(v, len(cols), p.g)


@dataclass(frozen=True)
class MCEstimate:
    p_hat: float
    stderr: float
    hits: int
    samples: int
    seed: int


def _chunk_hits(g: int, k: int, t: int, n: int, seed: int, chunk_id: int) -> int:
    table = _increment_table(g, k, False)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk_id,))))
    idx = rng.integers(0, table.shape[0], size=(n, t))
    pos = np.zeros((n, table.shape[1]), dtype=np.int64)
    for s in range(t):
        pos += table[idx[:, s]]
    return int(np.count_nonzero(~pos.any(axis=1)))


def mc_return_probability(p: Params, samples: int, seed: int = 0, workers: int | None = None) -> MCEstimate:
    """Plain Monte Carlo estimate of ``P(X_t = 0)`` with ``t = p.t``.

    Each walk takes ``t`` steps, each step a uniformly random full column.
    Samples are cut into fixed chunks of :data:`MC_CHUNK` walks; chunk ``c``
    draws from a Philox stream keyed by ``SeedSequence(seed, spawn_key=(c,))``.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    _check_columns(p, False, None)
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    jobs = [(p.g, p.k, p.t, n, seed, c) for c, n in enumerate(sizes)]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda a: _chunk_hits(*a), jobs))
    else:
        hits = sum(_chunk_hits(*a) for a in jobs)
    p_hat = hits / samples
    return MCEstimate(p_hat, float(np.sqrt(p_hat * (1 - p_hat) / samples)), hits, samples, seed)
