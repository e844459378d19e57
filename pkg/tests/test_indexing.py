import numpy as np
import pytest
from hypothesis import given, strategies as st

from liouville.core import devectorize, index_to_pair, nzrem, pair_to_index, vectorize


@pytest.mark.parametrize("a, b, expected", [(4, 2, 2), (3, 2, 1), (7, 3, 1), (9, 3, 3), (1, 5, 1)])
def test_nzrem(a, b, expected):
    assert nzrem(a, b) == expected


@given(st.integers(1, 10_000), st.integers(1, 200))
def test_nzrem_range(a, b):
    r = nzrem(a, b)
    assert 1 <= r <= b
    assert (a - r) % b == 0


def test_index_to_pair_examples():
    # last line of the 2-level element table: n=2, p=4
    assert index_to_pair(2, 2) == (1, 2)
    assert index_to_pair(4, 2) == (2, 2)
    assert index_to_pair(1, 5) == (1, 1)
    assert index_to_pair(9, 3) == (3, 3)


@pytest.mark.parametrize("n", [0, 5, -1])
def test_index_to_pair_out_of_range(n):
    with pytest.raises(IndexError):
        index_to_pair(n, 2)


@pytest.mark.parametrize("N", range(1, 9))
def test_round_trip(N):
    for n in range(1, N * N + 1):
        a, b = index_to_pair(n, N)
        assert 1 <= a <= N and 1 <= b <= N
        assert (a - 1) * N + b == n
        assert pair_to_index(a, b, N) == n


def test_vectorize_layout():
    rho = np.array([[11, 12], [21, 22]])
    np.testing.assert_array_equal(vectorize(rho), [11, 12, 21, 22])
    r3 = np.arange(9).reshape(3, 3)
    # rho_23 sits at 1-based position 6
    assert vectorize(r3)[6 - 1] == r3[1, 2]


def test_devectorize_inverse(rng):
    for n in (1, 2, 3, 7):
        rho = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        np.testing.assert_array_equal(devectorize(vectorize(rho)), rho)


def test_devectorize_bad_length():
    with pytest.raises(ValueError, match="perfect square"):
        devectorize(np.zeros(5))
    with pytest.raises(ValueError):
        devectorize(np.zeros(4), N=3)
