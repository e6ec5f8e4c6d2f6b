import math
import os
import sys

import numpy as np
import pytest

# Ensure kitaev_lab package is found
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from kitaev_lab.errors import ResourceLimitError, ShapeError
from kitaev_lab.profile import (
    compute_profile,
    multiply_by_gate,
    profile_doubled,
    profile_doubled_recursive,
    profile_kitaev,
    profile_product,
    tripled_low_counts,
)
from kitaev_lab.schemas import doubled_vector, kitaev_vector, product_vector, tripled_vector


def test_multiply_by_gate():
    assert multiply_by_gate([1, 1], 2) == [1, 1, 1, 1]
    assert multiply_by_gate([1], 3) == [1, 0, 0, 1]


@pytest.mark.parametrize(
    "v, counts",
    [
        ((), (1,)),
        ((1,), (1, 1)),
        ((2,), (1, 0, 1)),
        ((1, 1), (1, 2, 1)),
        ((1, 2, 4), (1,) * 8),
        ((1, 1, 1), (1, 3, 3, 1)),
    ],
)
def test_small_profiles(v, counts):
    p = compute_profile(v)
    assert p.counts == counts
    assert p.n_total == sum(v)
    assert p.m_count == len(v)


def test_permutation_invariance():
    assert compute_profile([4, 1, 2, 1]) == compute_profile([1, 1, 2, 4])


@pytest.mark.parametrize("seed", range(20))
def test_random_shuffles_keep_the_profile(seed):
    rng = np.random.default_rng(seed)
    v = [int(m) for m in rng.integers(1, 10, size=int(rng.integers(1, 9)))]
    expected = compute_profile(v)
    for _ in range(5):
        assert compute_profile(rng.permutation(v).tolist()) == expected


@pytest.mark.parametrize("seed", range(10))
def test_raw_gate_products_are_reflection_symmetric(seed):
    rng = np.random.default_rng(100 + seed)
    counts = [1]
    for m in rng.integers(1, 8, size=int(rng.integers(1, 8))):
        counts = multiply_by_gate(counts, int(m))
    assert counts == counts[::-1]


@pytest.mark.parametrize("m_count", range(0, 8))
def test_kitaev_profile_is_flat(m_count):
    assert profile_kitaev(m_count) == compute_profile(kitaev_vector(m_count))


@pytest.mark.parametrize("n_total", [0, 1, 5, 12])
def test_product_profile_is_binomial(n_total):
    p = profile_product(n_total)
    assert p == compute_profile(product_vector(n_total))
    assert p.counts == tuple(math.comb(n_total, n) for n in range(n_total + 1))


@pytest.mark.parametrize("m_count", range(2, 21, 2))
def test_doubled_closed_form(m_count):
    p = profile_doubled(m_count)
    assert p == compute_profile(doubled_vector(m_count))
    half = 2 ** (m_count // 2)
    assert list(p.counts[:half]) == list(range(1, half + 1))
    assert p.counts == p.counts[::-1]


def test_doubled_needs_even_m():
    with pytest.raises(ShapeError):
        profile_doubled(3)


def test_doubled_recursion_counts_up():
    # J(n) = n + 1 on the low range, checked against the explicit profile too
    counts = profile_doubled(12).counts
    for n in range(64):
        assert profile_doubled_recursive(n) == n + 1 == counts[n]


@pytest.mark.parametrize("m_count", [3, 6, 9, 12])
def test_tripled_low_range(m_count):
    low = tripled_low_counts(m_count)
    assert len(low) == 2 ** (m_count // 3)
    assert list(compute_profile(tripled_vector(m_count)).counts[: len(low)]) == low


def test_tripled_needs_multiple_of_three():
    with pytest.raises(ShapeError):
        tripled_low_counts(4)


def test_qubit_cap():
    with pytest.raises(ResourceLimitError, match="KPL_MAX_QUBITS"):
        compute_profile(product_vector(5), max_qubits=4)
    with pytest.raises(ResourceLimitError):
        profile_product(5, max_qubits=4)


def test_profiles_are_symmetric():
    for v in ([1, 3], [2, 2, 5], [1, 1, 2, 7]):
        p = compute_profile(v)
        assert p.counts == p.counts[::-1]
        assert sum(p.counts) == 2 ** p.m_count
