"""
Closed-form reference curves: repetition bounds, the standard Kitaev cost
and the lossy asymptotes.

The shape-checked functions only accept the N at which the formulas were
derived; `bound_curves` evaluates the same expressions at any real N and is
meant for plotting only.
"""

import math
from typing import Dict, Iterable, List, Optional

from kitaev_lab.cost import optimal_cost, optimum_cost
from kitaev_lab.errors import ShapeError
from kitaev_lab.profile import compute_profile
from kitaev_lab.schemas import tripled_vector


def _levels(n_total: int, repetitions: int) -> Optional[int]:
    """K such that n_total == repetitions·(2^K - 1), K >= 1; None if no such K."""
    if n_total <= 0 or n_total % repetitions:
        return None
    base = n_total // repetitions + 1
    if base & (base - 1):
        return None
    return base.bit_length() - 1


def is_doubled_shape(n_total: int) -> bool:
    return _levels(n_total, 2) is not None


def is_tripled_shape(n_total: int) -> bool:
    return _levels(n_total, 3) is not None


def is_kitaev_shape(n_total: int) -> bool:
    return _levels(n_total, 1) is not None


def _doubled_formula(n: float) -> float:
    return 4.0 * (math.log(n + 2) - math.log(2) + 3.0) / (n + 2) ** 2


def _tripled_formula(n: float) -> float:
    return 27.0 * (n + 1) / (n + 3) ** 3


def bound_doubled(n_total: int) -> float:
    """Upper bound on the m1 ∧ m1 cost at N = 2(2^{M/2} - 1)."""
    if not is_doubled_shape(n_total):
        raise ShapeError(f"N={n_total} is not of the form 2(2^k - 1)")
    return _doubled_formula(n_total)


def bound_tripled(n_total: int) -> float:
    """Upper bound on the m1 ∧ m1 ∧ m1 cost at N = 3(2^{M/3} - 1)."""
    if not is_tripled_shape(n_total):
        raise ShapeError(f"N={n_total} is not of the form 3(2^k - 1)")
    return _tripled_formula(n_total)


def cost_kitaev_closed(n_total: int) -> float:
    """2/(N+1) at N = 2^M - 1."""
    if n_total != 0 and not is_kitaev_shape(n_total):
        raise ShapeError(f"N={n_total} is not of the form 2^M - 1")
    return 2.0 / (n_total + 1)


def lossy_unentangled_asymptote(eta: float, n_total: float) -> float:
    """e·ln(1/η)/N, the large-N cost limit for unentangled lossy strategies."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1) for the unentangled asymptote, got {eta}")
    if n_total <= 0:
        raise ValueError("n_total must be > 0")
    return math.e * math.log(1.0 / eta) / n_total


def lossy_general_bound(eta: float, n_total: float) -> float:
    """(1 - η)/(ηN), valid for any input state."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if n_total <= 0:
        raise ValueError("n_total must be > 0")
    return (1.0 - eta) / (eta * n_total)


def tripled_sum_lower_bound(m_count: int) -> float:
    """2^M - (3/2)·2^{M/3} + 1, a lower bound on Σ √(J(n)J(n+1)) for m1 ∧ m1 ∧ m1."""
    if m_count < 3 or m_count % 3:
        raise ShapeError(f"m_count must be a positive multiple of 3, got {m_count}")
    return 2.0 ** m_count - 1.5 * 2.0 ** (m_count // 3) + 1.0


def tripled_ratio_table(max_m_count: int) -> List[Dict[str, float]]:
    """cost(m3)/optimum for M = 3, 6, ..., max_m_count."""
    rows = []
    for m_count in range(3, max_m_count + 1, 3):
        p = compute_profile(tripled_vector(m_count))
        cost = optimal_cost(p)
        optimum = optimum_cost(p.n_total)
        rows.append({"M": m_count, "N": p.n_total, "cost": cost, "optimum": optimum, "ratio": cost / optimum})
    return rows


def bound_curves(n_values: Iterable[float]) -> Dict[str, List[tuple]]:
    """
    Continuous (plotting-only) evaluation of the reference formulas.
    Not shape-checked: off-shape N values have no derivation behind them.
    """
    curves: Dict[str, List[tuple]] = {"optimum": [], "kitaev": [], "bound_m2": [], "bound_m3": []}
    for n in n_values:
        n = float(n)
        curves["optimum"].append((n, 4.0 * math.sin(math.pi / (2.0 * (n + 2))) ** 2))
        curves["kitaev"].append((n, 2.0 / (n + 1)))
        curves["bound_m2"].append((n, _doubled_formula(n)))
        curves["bound_m3"].append((n, _tripled_formula(n)))
    return curves
