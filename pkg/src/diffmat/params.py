"""Parameter tuples and the (pair, residue) <-> flat coordinate scheme.

Coordinates of the ambient space are indexed by an unordered row pair
``(i, j)`` with ``1 <= i < j <= k`` and a nonzero residue ``a`` in
``1..g-1``.  Pairs are ordered lexicographically and, within a pair, by
residue, so the flat index of ``((i, j), a)`` is ``pair_rank * (g-1) + a - 1``.
Flat indices are 0-based; pair labels are 1-based.
"""
from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass, field
from functools import cached_property
from math import comb

from .errors import DomainError

Pair = tuple[int, int]


def _as_int(name: str, value) -> int:
    try:
        return operator.index(value)
    except TypeError:
        raise DomainError(f"{name} must be an integer, got {value!r}") from None


@dataclass(frozen=True)
class Params:
    g: int
    k: int
    lam: int
    _pair_rank: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        ranks = {pr: n for n, pr in enumerate(itertools.combinations(range(1, self.k + 1), 2))}
        object.__setattr__(self, "_pair_rank", ranks)

    @property
    def t(self) -> int:
        """Number of columns, ``lam * g``."""
        return self.lam * self.g

    @property
    def n_pairs(self) -> int:
        return comb(self.k, 2)

    @property
    def d(self) -> int:
        """Ambient dimension ``C(k,2) * (g-1)``."""
        return self.n_pairs * (self.g - 1)

    @cached_property
    def pairs(self) -> tuple[Pair, ...]:
        return tuple(itertools.combinations(range(1, self.k + 1), 2))

    @property
    def parity_obstructed(self) -> bool:
        """True when g is even, lambda odd and k >= 3 (no matrices exist)."""
        return self.g % 2 == 0 and self.lam % 2 == 1 and self.k >= 3

    @property
    def parity_flag(self) -> bool:
        """g even and lambda odd, regardless of k."""
        return self.g % 2 == 0 and self.lam % 2 == 1

    @property
    def too_many_rows(self) -> bool:
        """True when k > lam*g, in which case no matrix exists."""
        return self.k > self.t

    @property
    def in_hypothesis(self) -> bool:
        """Whether k >= 3, as the asymptotic results assume."""
        return self.k >= 3

    @property
    def advisories(self) -> tuple[str, ...]:
        notes = []
        if self.parity_obstructed:
            notes.append("parity: g even and lambda odd with k >= 3; no difference matrix exists")
        if self.too_many_rows:
            notes.append("rows: k > lambda*g; no difference matrix exists")
        if not self.in_hypothesis:
            notes.append("k < 3: asymptotic results are out of stated hypothesis")
        return tuple(notes)

    def as_dict(self) -> dict:
        return {"g": self.g, "k": self.k, "lambda": self.lam, "t": self.t, "d": self.d}

    def pair_rank(self, pair: Pair) -> int:
        i, j = pair
        if i > j:
            i, j = j, i
        try:
            return self._pair_rank[(i, j)]
        except KeyError:
            raise DomainError(f"pair {pair!r} is not a valid row pair for k={self.k}") from None

    def block(self, pair: Pair) -> slice:
        """Slice of flat indices belonging to ``pair``."""
        r = self.pair_rank(pair)
        return slice(r * (self.g - 1), (r + 1) * (self.g - 1))


def make_params(g: int, k: int, lam: int) -> Params:
    """Validate ``(g, k, lambda)`` and build a :class:`Params`.

    Existence obstructions (the parity case and ``k > lambda*g``)
    are reported through :attr:`Params.advisories`, not raised.
    """
    g, k, lam = _as_int("g", g), _as_int("k", k), _as_int("lambda", lam)
    if g < 2:
        raise DomainError(f"g must be >= 2, got {g}")
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if lam < 1:
        raise DomainError(f"lambda must be >= 1, got {lam}")
    return Params(g, k, lam)


def flat_index(p: Params, pair: Pair, a: int) -> int:
    """Flat 0-based index of coordinate ``(pair, a)``."""
    a = _as_int("a", a)
    if not 1 <= a <= p.g - 1:
        raise DomainError(f"residue a must lie in 1..{p.g - 1}, got {a}")
    return p.pair_rank(pair) * (p.g - 1) + a - 1


def coord_of(p: Params, flat: int) -> tuple[Pair, int]:
    """Inverse of :func:`flat_index`."""
    flat = _as_int("flat", flat)
    if not 0 <= flat < p.d:
        raise DomainError(f"flat index must lie in 0..{p.d - 1}, got {flat}")
    r, a = divmod(flat, p.g - 1)
    return p.pairs[r], a + 1


def coordinates(p: Params):
    """All ``(pair, a)`` coordinates in flat order."""
    return [(pr, a) for pr in p.pairs for a in range(1, p.g)]
