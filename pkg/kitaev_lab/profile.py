"""
Multiplicity profiles J_m(n): how many computational basis states pick up
the phase n·φ. J_m is the coefficient list of Π_i (1 + x^{m_i}).

All arithmetic here is exact (Python ints); floating point starts in cost.py.
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Sequence

from kitaev_lab.errors import ResourceLimitError, ShapeError
from kitaev_lab.schemas import PhaseProfile, VectorLike, canonicalize
from kitaev_lab.settings import get_settings

logger = logging.getLogger(__name__)


def _check_qubit_cap(m_count: int, max_qubits: Optional[int]) -> None:
    cap = get_settings().max_qubits if max_qubits is None else max_qubits
    if m_count > cap:
        raise ResourceLimitError(f"M={m_count} exceeds the profile cap of {cap} qubits (KPL_MAX_QUBITS)")


def multiply_by_gate(counts: Sequence[int], m: int) -> List[int]:
    """counts · (1 + x^m): one shifted addition."""
    out = list(counts) + [0] * m
    for n, c in enumerate(counts):
        if c:
            out[n + m] += c
    return out


def compute_profile(v: VectorLike, max_qubits: Optional[int] = None) -> PhaseProfile:
    vector = canonicalize(v)
    _check_qubit_cap(vector.m_count, max_qubits)
    counts: List[int] = [1]
    for m in vector.entries:
        counts = multiply_by_gate(counts, m)
    return PhaseProfile(n_total=vector.n_total, m_count=vector.m_count, counts=tuple(counts))


def profile_kitaev(m_count: int, max_qubits: Optional[int] = None) -> PhaseProfile:
    """Flat profile of (1, 2, ..., 2^{M-1}): every n in 0..2^M-1 exactly once."""
    if m_count < 0:
        raise ValueError("m_count must be >= 0")
    _check_qubit_cap(m_count, max_qubits)
    n_total = 2 ** m_count - 1
    return PhaseProfile(n_total=n_total, m_count=m_count, counts=(1,) * (n_total + 1))


def profile_product(n_total: int, max_qubits: Optional[int] = None) -> PhaseProfile:
    """Binomial profile of N single-gate qubits."""
    if n_total < 0:
        raise ValueError("n_total must be >= 0")
    _check_qubit_cap(n_total, max_qubits)
    counts = tuple(math.comb(n_total, n) for n in range(n_total + 1))
    return PhaseProfile(n_total=n_total, m_count=n_total, counts=counts)


def profile_doubled(m_count: int, max_qubits: Optional[int] = None) -> PhaseProfile:
    """
    Profile of m1 ∧ m1 (every power of two on two qubits).
    J(n) = n + 1 below 2^{M/2}, mirrored above.
    """
    if m_count < 2 or m_count % 2:
        raise ShapeError(f"doubled profiles need an even m_count >= 2, got {m_count}")
    _check_qubit_cap(m_count, max_qubits)
    half = 2 ** (m_count // 2)
    n_total = 2 * (half - 1)
    counts = [n + 1 if n < half else n_total - n + 1 for n in range(n_total + 1)]
    return PhaseProfile(n_total=n_total, m_count=m_count, counts=tuple(counts))


@lru_cache(maxsize=None)
def profile_doubled_recursive(n: int) -> int:
    """Pseudobinary recursion for J_{m2}(n), valid for 0 <= n < 2^{M/2}."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    if n % 2 == 0:
        return profile_doubled_recursive(n // 2) + profile_doubled_recursive((n - 2) // 2)
    return 2 * profile_doubled_recursive((n - 1) // 2)


def tripled_low_counts(m_count: int) -> List[int]:
    """
    J_{m3}(n) for 0 <= n < 2^{M/3}.
    Below the smallest missing power the product of (1 + x^{2^i})^3 agrees
    with (1 - x)^{-3}, so J(n) = C(n + 2, 2).
    """
    if m_count < 3 or m_count % 3:
        raise ShapeError(f"tripled profiles need m_count divisible by 3, got {m_count}")
    return [math.comb(n + 2, 2) for n in range(2 ** (m_count // 3))]
