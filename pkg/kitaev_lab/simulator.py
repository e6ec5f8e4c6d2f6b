"""
Monte Carlo oracle for the cost formulas.

Estimates φ̃ of the optimal covariant measurement are drawn uniformly on
[0, 2π) and accepted against the density of the error θ = φ̃ - φ,

    p(θ) = |Σ_n √J(n) e^{inθ}|² / (2π 2^M),

under the uniform envelope (N + 1)/2π (Cauchy-Schwarz). Samples are split
into a fixed number of shards with seeds spawned from one SeedSequence, so
the estimate does not depend on how many workers ran them.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from kitaev_lab.cost import optimal_cost
from kitaev_lab.errors import SamplingError
from kitaev_lab.profile import compute_profile
from kitaev_lab.schemas import PhaseProfile, SimConfig, SimulationResult, VectorLike, as_vector
from kitaev_lab.settings import get_settings

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ENVELOPE_TOLERANCE = 1e-12
BATCH_SIZE = 8192
# expected draws per accepted sample are N + 1; give up far beyond that
MAX_DRAWS_FACTOR = 1000


def amplitudes(p: PhaseProfile) -> np.ndarray:
    """√J(n)/2^{M/2}, the output-state amplitudes."""
    roots = np.sqrt(np.asarray([float(c) for c in p.counts]))
    return roots * 2.0 ** (-p.m_count / 2.0)


def _density(amps: np.ndarray, theta: np.ndarray) -> np.ndarray:
    z = np.exp(1j * theta)
    return np.abs(P.polyval(z, amps)) ** 2 / TWO_PI


def outcome_density(p: PhaseProfile, theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Density of the estimate error θ; 2π-periodic, peaks at θ = 0."""
    values = _density(amplitudes(p), np.asarray(theta, dtype=np.float64))
    return float(values) if np.ndim(values) == 0 else values


def envelope(p: PhaseProfile) -> float:
    return (p.n_total + 1) / TWO_PI


def _sample_shard(
    amps: np.ndarray, true_phase: float, samples: int, seed: np.random.SeedSequence
) -> Tuple[int, float, float, int, int, float]:
    """(count, mean, sum of squared deviations, draws, accepted draws, max density) for one shard."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n_plus_one = len(amps)
    bound = n_plus_one / TWO_PI
    max_draws = MAX_DRAWS_FACTOR * n_plus_one * samples
    costs: List[np.ndarray] = []
    needed = samples
    draws = 0
    accepted_draws = 0
    max_density = 0.0
    while needed > 0:
        if draws >= max_draws:
            raise SamplingError(f"rejection sampling drew {draws} candidates for {samples} samples")
        estimate = rng.uniform(0.0, TWO_PI, BATCH_SIZE)
        u = rng.uniform(0.0, 1.0, BATCH_SIZE)
        density = _density(amps, estimate - true_phase)
        draws += BATCH_SIZE
        peak = float(density.max())
        max_density = max(max_density, peak)
        if peak > bound + ENVELOPE_TOLERANCE:
            raise SamplingError(f"density {peak} exceeds the envelope {bound}")
        hits = estimate[u * bound <= density]
        accepted_draws += len(hits)
        accepted = hits[:needed]
        costs.append(4.0 * np.sin((accepted - true_phase) / 2.0) ** 2)
        needed -= len(accepted)
    values = np.concatenate(costs)
    mean = float(values.mean())
    return len(values), mean, float(np.sum((values - mean) ** 2)), draws, accepted_draws, max_density


def _shard_sizes(samples: int, shards: int) -> List[int]:
    shards = min(shards, samples)
    base, extra = divmod(samples, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def _merge_shards(parts: Sequence[Tuple[int, float, float, int, int, float]]) -> Tuple[int, float, float]:
    """Pairwise (Chan) merge of shard means and squared deviations."""
    count, mean, m2 = 0, 0.0, 0.0
    for n_b, mean_b, m2_b, *_ in parts:
        total = count + n_b
        delta = mean_b - mean
        mean += delta * n_b / total
        m2 += m2_b + delta * delta * count * n_b / total
        count = total
    return count, mean, m2


def simulate(cfg: SimConfig, threads: Optional[int] = None, shards: Optional[int] = None) -> SimulationResult:
    settings = get_settings()
    threads = settings.threads if threads is None else threads
    shards = settings.sim_shards if shards is None else shards

    p = compute_profile(cfg.vector)
    amps = amplitudes(p)
    sizes = _shard_sizes(cfg.samples, shards)
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(len(sizes))
    logger.info(f"🎲 Sampling {cfg.samples} outcomes for {cfg.vector} in {len(sizes)} shards (seed={cfg.rng_seed})")

    if threads > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(_sample_shard, amps, cfg.true_phase, n, s) for n, s in zip(sizes, seeds)]
            parts = [f.result() for f in futures]
    else:
        parts = [_sample_shard(amps, cfg.true_phase, n, s) for n, s in zip(sizes, seeds)]
    for i, part in enumerate(parts):
        logger.debug(f"  shard {i}: {part[0]} samples, mean {part[1]:.6f}, {part[3]} draws")

    count, mean, m2 = _merge_shards(parts)
    std_error = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    draws = sum(part[3] for part in parts)
    accepted_draws = sum(part[4] for part in parts)
    return SimulationResult(
        config=cfg,
        mean_cost=mean,
        std_error=std_error,
        analytic=optimal_cost(p),
        acceptance_rate=accepted_draws / draws,
        max_density=max(part[5] for part in parts),
    )


def simulate_cost(cfg: SimConfig) -> Tuple[float, float]:
    """(empirical mean cost, standard error)."""
    result = simulate(cfg)
    return result.mean_cost, result.std_error


def phase_covariance_check(
    v: VectorLike, phases: Sequence[float] = (0.0, 1.0, 2.5), samples: int = 100_000, seed: int = 0
) -> Tuple[bool, List[SimulationResult]]:
    """Runs at each phase must agree pairwise within 3 combined standard errors."""
    vector = as_vector(v)
    results = [simulate(SimConfig(vector=vector, true_phase=phi, samples=samples, rng_seed=seed)) for phi in phases]
    passed = True
    for i, a in enumerate(results):
        for b in results[i + 1:]:
            sigma = math.hypot(a.std_error, b.std_error)
            if abs(a.mean_cost - b.mean_cost) > 3.0 * sigma + ENVELOPE_TOLERANCE:
                logger.warning(
                    f"⚠️ Phase {a.config.true_phase} and {b.config.true_phase} disagree: "
                    f"{a.mean_cost:.6f} vs {b.mean_cost:.6f}"
                )
                passed = False
    return passed, results
