"""
Bayesian mean cost <4 sin²((φ̃ - φ)/2)> of a generalized Kitaev strategy
measured with a covariant POVM.

With Σ J = 2^M the minimal cost 2 - 2^{1-M} Σ √(J(n)J(n+1)) equals

    2^{1-M} [ (J(0) + J(N))/2 + ½ Σ (√J(n) - √J(n+1))² ]

which is what we evaluate: every term is nonnegative, so nothing cancels
when the cost is ~1/N² and M is large.
"""

import logging
import math
from typing import Sequence, Union

import numpy as np

from kitaev_lab.errors import DimensionError, ShapeError
from kitaev_lab.profile import compute_profile, profile_product
from kitaev_lab.schemas import CostReport, PhaseProfile, SeedOffDiagonals, VectorLike, canonicalize
from kitaev_lab.settings import FAST_PATH_QUBIT_CEILING

logger = logging.getLogger(__name__)

CountsLike = Union[Sequence[int], np.ndarray]


def profile_roughness(counts: CountsLike, m_count: int) -> float:
    """(J(0) + J(N))/2 + ½ Σ (√J(n) - √J(n+1))²."""
    ends = (int(counts[0]) + int(counts[-1])) / 2.0
    if len(counts) < 2:
        return ends
    if m_count <= FAST_PATH_QUBIT_CEILING:
        j = np.asarray(counts, dtype=np.float64)
        diff = j[:-1] - j[1:]
        denom = np.sqrt(j[:-1]) + np.sqrt(j[1:])
        # (√a - √b)² written as (a - b)² / (√a + √b)²; zero where both are zero
        safe = np.where(denom > 0.0, denom, 1.0)
        terms = np.where(denom > 0.0, (diff / safe) ** 2, 0.0)
        return ends + 0.5 * math.fsum(terms.tolist())
    terms = []
    for a, b in zip(counts[:-1], counts[1:]):
        a, b = int(a), int(b)
        if a == b:
            continue
        d = float(a - b) / (math.sqrt(a) + math.sqrt(b))
        terms.append(d * d)
    return ends + 0.5 * math.fsum(terms)


def profile_cost(counts: CountsLike, m_count: int) -> float:
    """Optimal cost straight from a count array (used by the search hot path)."""
    return math.ldexp(profile_roughness(counts, m_count), 1 - m_count)


def optimal_cost(p: PhaseProfile) -> float:
    """Minimal cost over covariant measurements (all-ones seed band)."""
    return profile_cost(p.counts, p.m_count)


def _pair_roots(counts: Sequence[int]) -> list:
    return [math.sqrt(a) * math.sqrt(b) for a, b in zip(counts[:-1], counts[1:])]


def cost_with_seed(p: PhaseProfile, s: Union[SeedOffDiagonals, Sequence[float]]) -> float:
    """
    Cost for a seed operator with unit diagonal and real first off-diagonal band r(n):
    2 - 2^{1-M} Σ r(n) √(J(n)J(n+1)).
    """
    seed = s if isinstance(s, SeedOffDiagonals) else SeedOffDiagonals(values=tuple(s))
    if len(seed.values) != p.n_total:
        raise DimensionError(f"seed has {len(seed.values)} off-diagonals, profile needs N={p.n_total}")
    # optimal part plus the penalty Σ (1 - r) √(J J'), which is zero for r == 1
    penalty = math.fsum((1.0 - r) * root for r, root in zip(seed.values, _pair_roots(p.counts)) if r != 1.0)
    return optimal_cost(p) + math.ldexp(penalty, 1 - p.m_count)


def optimum_cost(n_total: int) -> float:
    """Entangled Bayesian optimum 2[1 - cos(π/(N+2))], written as 4 sin²(π/(2(N+2)))."""
    if n_total < 0:
        raise ValueError("n_total must be >= 0")
    return 4.0 * math.sin(math.pi / (2.0 * (n_total + 2))) ** 2


def shot_noise_cost(n_total: int) -> float:
    """Cost of N single-pass qubits."""
    return optimal_cost(profile_product(n_total))


def cost_doubled_closed(m_count: int) -> float:
    """Closed form for m1 ∧ m1: 2 - 2^{2-M} Σ_{n<2^{M/2}} √(n(n+1))."""
    if m_count < 2 or m_count % 2:
        raise ShapeError(f"m_count must be even and >= 2, got {m_count}")
    half = 2 ** (m_count // 2)
    total = math.fsum(math.sqrt(n * (n + 1)) for n in range(half))
    return 2.0 - math.ldexp(total, 2 - m_count)


def make_report(v: VectorLike) -> CostReport:
    vector = canonicalize(v)
    p = compute_profile(vector)
    cost = optimal_cost(p)
    return CostReport(
        vector=vector,
        n_total=p.n_total,
        m_count=p.m_count,
        cost=cost,
        optimum_ratio=cost / optimum_cost(p.n_total),
    )
