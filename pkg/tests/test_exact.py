import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffmat import (
    BudgetError,
    IntegrityError,
    count,
    count_brute,
    count_dft,
    exact_return_probability,
    make_params,
    parity_obstruction,
)
from diffmat.exact import (
    balanced_multiplicities,
    count_closed_form_g2k3,
    count_closed_form_k2,
    count_sequences,
    dft_modulus,
)


def blind_matrix_count(g, k, lam):
    """Check every k x t matrix over Z_g; feasible only for tiny cases."""
    t = lam * g
    total = 0
    for entries in itertools.product(range(g), repeat=k * t):
        rows = [entries[r * t:(r + 1) * t] for r in range(k)]
        ok = all(
            sorted((a - b) % g for a, b in zip(rows[i], rows[j])) == sorted(list(range(g)) * lam)
            for i, j in itertools.combinations(range(k), 2)
        )
        total += ok
    return total


@pytest.mark.parametrize("case", [(2, 2, 1), (2, 3, 1), (2, 2, 2), (3, 2, 1), (2, 3, 2)])
def test_brute_matches_blind_enumeration(case):
    assert count_brute(make_params(*case)) == blind_matrix_count(*case)


@pytest.mark.parametrize("case,expect", [((2, 3, 1), 0), ((2, 3, 2), 384), ((3, 3, 1), 486), ((2, 2, 1), 8)])
def test_count_examples(case, expect):
    p = make_params(*case)
    assert count_brute(p) == expect
    assert count_dft(p).count == expect


def test_sequence_enumeration_oracle():
    assert count_sequences(make_params(3, 3, 1)) == 486
    assert count_sequences(make_params(2, 3, 2)) == 384


def test_unique_balanced_vector_g2k3_lam2():
    assert list(balanced_multiplicities(make_params(2, 3, 2))) == [(1, 1, 1, 1)]


FEASIBLE = [(2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 2, 4), (2, 3, 1), (2, 3, 2), (2, 3, 3), (2, 3, 4), (3, 3, 1)]


@pytest.mark.parametrize("case", FEASIBLE)
def test_method_equivalence_and_invariants(case):
    p = make_params(*case)
    b = count_brute(p)
    d = count_dft(p)
    assert b == d.count and d.residual < 0.25
    assert b % p.g**p.t == 0
    assert exact_return_probability(p) * p.g ** (p.k * p.t) == b
    if parity_obstruction(p):
        assert b == 0


@pytest.mark.parametrize("g,lam", [(g, lam) for g in (2, 3) for lam in (1, 2, 3)])
def test_k2_closed_form(g, lam):
    p = make_params(g, 2, lam)
    assert count_brute(p) == count_closed_form_k2(p) == p.g**p.t * math.factorial(p.t) // math.factorial(lam) ** g


@pytest.mark.parametrize("lam", range(1, 9))
def test_g2k3_closed_form(lam):
    p = make_params(2, 3, lam)
    assert count_brute(p) == count_closed_form_g2k3(p)


def test_exact_return_probability_examples():
    assert exact_return_probability(make_params(2, 3, 2)) == Fraction(3, 32)
    assert exact_return_probability(make_params(2, 3, 1)) == 0
    assert exact_return_probability(make_params(2, 2, 1)) == Fraction(1, 2)


def test_parity_obstruction_examples():
    assert parity_obstruction(make_params(2, 3, 1))
    assert not parity_obstruction(make_params(2, 3, 2))
    assert not parity_obstruction(make_params(3, 4, 1))
    assert not parity_obstruction(make_params(2, 2, 1))


@pytest.mark.parametrize("case", [(2, 3, 1), (2, 3, 3), (4, 3, 1), (6, 3, 1), (8, 3, 1), (2, 4, 1), (4, 4, 1)])
def test_parity_cases_vanish(case):
    p = make_params(*case)
    assert count_brute(p) == 0
    assert count_dft(p).count == 0


def test_dft_modulus_separates_and_contains_lambda0():
    for case in FEASIBLE:
        p = make_params(*case)
        N = dft_modulus(p)
        assert N > p.lam * (p.g - 1) and N % p.g == 0


def test_budgets_and_dispatch():
    p = make_params(2, 4, 4)
    with pytest.raises(BudgetError):
        count_brute(p, budget=10)
    with pytest.raises(BudgetError):
        count_dft(make_params(3, 3, 4), budget=10)
    assert count(make_params(2, 3, 2), "auto") == (384, "brute")
    assert count(make_params(2, 3, 2), "dft") == (384, "dft")
    with pytest.raises(ValueError):
        count(make_params(2, 3, 2), "magic")


def test_dft_integrity_guard_on_large_counts():
    with pytest.raises(IntegrityError):
        count_dft(make_params(2, 3, 32))


@given(st.integers(1, 6))
def test_count_nonnegative_and_divisible(lam):
    p = make_params(3, 2, lam)
    c = count_brute(p)
    assert c > 0 and c % 3**p.t == 0
