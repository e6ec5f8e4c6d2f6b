"""
Photon-loss models.

Exact mode averages noiseless costs over every loss pattern (a lost photon
is always detected, it just removes its qubit). Resource-adjusted mode keeps
the noiseless cost and charges m/η^m per qubit, the expected spend until a
block of m gates survives.
"""

import itertools
import logging
import math
from collections import Counter
from functools import lru_cache
from typing import Dict, Optional, Tuple

from kitaev_lab.cost import optimal_cost
from kitaev_lab.errors import KitaevLabError, ResourceLimitError
from kitaev_lab.profile import compute_profile
from kitaev_lab.schemas import LossConfig, LossMode, MultiplicityVector, VectorLike, canonicalize
from kitaev_lab.settings import get_settings

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


def _check_eta(eta: float) -> float:
    if not (0.0 < eta <= 1.0) or math.isnan(eta):
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    return float(eta)


@lru_cache(maxsize=65536)
def _noiseless_cost(entries: Tuple[int, ...]) -> float:
    return optimal_cost(compute_profile(MultiplicityVector(entries=entries)))


def loss_pattern_weights(v: VectorLike, eta: float) -> Dict[Tuple[int, ...], float]:
    """
    Probability of each surviving multiset. Qubits with equal multiplicity
    are interchangeable, so patterns are grouped by how many of each survive.
    """
    eta = _check_eta(eta)
    vector = canonicalize(v)
    groups = sorted(Counter(vector.entries).items())
    weights: Dict[Tuple[int, ...], float] = {}
    choices = [range(count + 1) for _, count in groups]
    for kept in itertools.product(*choices):
        weight = 1.0
        survivors = []
        for (m, count), k in zip(groups, kept):
            survive = eta ** m
            weight *= math.comb(count, k) * survive ** k * (1.0 - survive) ** (count - k)
            survivors.extend([m] * k)
        weights[tuple(survivors)] = weight
    return weights


def lossy_cost_exact(v: VectorLike, eta: float, max_qubits: Optional[int] = None) -> float:
    eta = _check_eta(eta)
    vector = canonicalize(v)
    cap = get_settings().exact_loss_cap if max_qubits is None else max_qubits
    if vector.m_count > cap:
        raise ResourceLimitError(
            f"exact lossy mixture over 2^{vector.m_count} patterns exceeds the cap of M={cap} (KPL_EXACT_LOSS_CAP)"
        )
    weights = loss_pattern_weights(vector, eta)
    total = math.fsum(weights.values())
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise KitaevLabError(f"loss-pattern weights sum to {total!r}, expected 1")
    cost = math.fsum(w * _noiseless_cost(kept) for kept, w in weights.items() if w > 0.0)
    logger.debug(f"🔦 Exact lossy cost of {vector} at eta={eta}: {cost} over {len(weights)} patterns")
    return cost


def qubit_charge(m: int, eta: float) -> float:
    """m/η^m; infinite once η^m is below the float range."""
    if eta == 1.0:
        return float(m)
    survive = eta ** m
    if survive == 0.0:
        return math.inf
    return m / survive


def lossy_resource_count(v: VectorLike, eta: float) -> float:
    """Σ m_i / η^{m_i}."""
    eta = _check_eta(eta)
    vector = canonicalize(v)
    return math.fsum(qubit_charge(m, eta) for m in vector.entries)


def lossy_cost_resource_adjusted(v: VectorLike, eta: float) -> Tuple[float, float]:
    """(noiseless optimal cost, adjusted resources)."""
    vector = canonicalize(v)
    return _noiseless_cost(vector.entries), lossy_resource_count(vector, eta)


def evaluate(v: VectorLike, config: LossConfig) -> Tuple[float, float]:
    """(cost, resources) under the configured loss mode."""
    vector = canonicalize(v)
    if config.mode == LossMode.EXACT:
        return lossy_cost_exact(vector, config.eta), float(vector.n_total)
    return lossy_cost_resource_adjusted(vector, config.eta)
