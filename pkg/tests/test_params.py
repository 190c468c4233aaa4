import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffmat import DomainError, coord_of, flat_index, make_params
from diffmat.params import coordinates


def test_make_params_examples():
    p = make_params(3, 4, 1)
    assert (p.t, p.d) == (3, 12)
    q = make_params(2, 3, 1)
    assert (q.t, q.d, q.parity_obstructed, q.parity_flag) == (2, 3, True, True)
    r = make_params(2, 2, 1)
    assert (r.t, r.d, r.parity_obstructed) == (2, 1, False)


@pytest.mark.parametrize("args", [(1, 3, 1), (2, 1, 1), (2, 3, 0), (2.5, 3, 1)])
def test_make_params_rejects(args):
    with pytest.raises(DomainError):
        make_params(*args)


def test_advisories():
    assert any("parity" in a for a in make_params(2, 3, 1).advisories)
    assert any("rows" in a for a in make_params(3, 5, 1).advisories)
    assert any("k < 3" in a for a in make_params(3, 2, 1).advisories)
    assert make_params(3, 3, 2).advisories == ()


def test_flat_index_examples():
    p = make_params(3, 4, 1)
    assert flat_index(p, (1, 2), 1) == 0
    assert flat_index(p, (3, 4), 2) == 11
    assert flat_index(make_params(2, 3, 1), (2, 3), 1) == 2


@pytest.mark.parametrize("pair,a", [((1, 1), 1), ((0, 2), 1), ((1, 5), 1), ((1, 2), 0), ((1, 2), 3)])
def test_flat_index_rejects(pair, a):
    with pytest.raises(DomainError):
        flat_index(make_params(3, 4, 1), pair, a)


def test_coord_of_rejects_out_of_range():
    with pytest.raises(DomainError):
        coord_of(make_params(2, 3, 1), 3)


@given(st.integers(2, 6), st.integers(2, 6))
def test_flat_index_bijection_and_order(g, k):
    p = make_params(g, k, 1)
    expected = [(pr, a) for pr in itertools.combinations(range(1, k + 1), 2) for a in range(1, g)]
    assert coordinates(p) == expected  # lexicographic in (pair, a)
    assert [flat_index(p, pr, a) for pr, a in expected] == list(range(p.d))
    assert all(coord_of(p, n) == expected[n] for n in range(p.d))
