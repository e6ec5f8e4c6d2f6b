"""
Optimizers over multiplicity vectors.

Costs only depend on the multiset of entries, so every enumeration walks
nondecreasing vectors. The constrained walker keeps the profile of the
current prefix as an int64 array and extends it one gate block at a time;
every node of the walk is a candidate.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Generator, List, Optional, Sequence, Tuple

import numpy as np

from kitaev_lab.cost import make_report, optimum_cost, profile_cost, profile_roughness
from kitaev_lab.errors import KitaevLabError, ResourceLimitError
from kitaev_lab.loss import qubit_charge
from kitaev_lab.schemas import (
    CostReport,
    MultiplicityVector,
    NearOptimalityReport,
    QubitOptimalityReport,
    SearchConfig,
    SearchEntry,
    SearchResult,
    SearchStrategy,
    kitaev_vector,
)
from kitaev_lab.settings import get_settings

logger = logging.getLogger(__name__)

# Accumulated float resources are compared against integer budgets
RESOURCE_SLACK = 1e-9
TIE_TOLERANCE = 1e-12
QUBIT_SEARCH_LIMIT = 12

# bucket -> (cost, entries, resources)
_Table = Dict[int, Tuple[float, Tuple[int, ...], float]]


def _gate(prof: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(len(prof) + m, dtype=np.int64)
    out[: len(prof)] = prof
    out[m:] += prof
    return out


def _bucket(resources: float) -> int:
    return math.ceil(resources - RESOURCE_SLACK)


def _beats(cost: float, entries: Tuple[int, ...], best: Optional[Tuple[float, Tuple[int, ...]]]) -> bool:
    """Lower cost wins; costs within TIE_TOLERANCE go to the smaller vector."""
    if best is None:
        return True
    best_cost, best_entries = best
    if abs(cost - best_cost) <= TIE_TOLERANCE:
        return entries < best_entries
    return cost < best_cost


def _keep_better(table: _Table, key: int, cost: float, entries: Tuple[int, ...], resources: float) -> None:
    current = table.get(key)
    if _beats(cost, entries, None if current is None else current[:2]):
        table[key] = (cost, entries, resources)


# ============= Exhaustive oracle =============

def int_partitions(n: int, _pivot: int = 1) -> Generator[Tuple[int, ...], None, None]:
    """Partitions of n as nondecreasing tuples."""
    yield (n,)
    for i in range(_pivot, n // 2 + 1):
        for p in int_partitions(n - i, _pivot=i):
            yield (i,) + p


def search_exhaustive(n_target: int, limit: Optional[int] = None) -> CostReport:
    """Best vector over every partition of n_target; ties go to the smallest vector."""
    if n_target < 0:
        raise ValueError("n_target must be >= 0")
    limit = get_settings().exhaustive_limit if limit is None else limit
    if n_target > limit:
        raise ResourceLimitError(f"exhaustive search is limited to N <= {limit} (KPL_EXHAUSTIVE_LIMIT), got {n_target}")
    if n_target == 0:
        return make_report(())

    best: Optional[Tuple[float, Tuple[int, ...]]] = None
    for parts in int_partitions(n_target):
        prof = np.ones(1, dtype=np.int64)
        for m in parts:
            prof = _gate(prof, m)
        cost = profile_cost(prof, len(parts))
        if _beats(cost, parts, best):
            best = (cost, parts)
    return make_report(best[1])


def near_optimality_report(n_min: int = 4, n_max: int = 20) -> NearOptimalityReport:
    rows = tuple(search_exhaustive(n) for n in range(n_min, n_max + 1))
    report = NearOptimalityReport(rows=rows)
    worst = report.worst
    if worst is None:
        return report
    if not report.within_soft_target:
        logger.warning(
            f"⚠️ Exhaustive best exceeds the optimum by more than {report.soft_target - 1:.0%}: "
            f"ratio {worst.optimum_ratio:.6f} at N={worst.n_total} ({worst.vector})"
        )
    if not report.within_hard_bound:
        logger.error(f"❌ Ratio {worst.optimum_ratio:.6f} at N={worst.n_total} is above the hard bound {report.hard_bound}")
    else:
        logger.info(f"✅ Max ratio over N in [{n_min}, {n_max}]: {report.max_ratio:.6f}")
    return report


# ============= Constrained enumeration =============

class _Walker:
    """Depth-first walk over nondecreasing vectors within the resource budget."""

    def __init__(self, cfg: SearchConfig, values: Sequence[int], weights: Sequence[float]):
        self.cfg = cfg
        self.values = list(values)
        self.weights = list(weights)
        self.limit = cfg.n_max + RESOURCE_SLACK
        self.table: _Table = {}

    def _emit(self, entries: List[int], prof: np.ndarray, resources: float, min_count: int) -> None:
        length = len(entries)
        if length == 0 or min_count < self.cfg.required_repetitions(length):
            return
        key = _bucket(resources)
        if key < self.cfg.n_min or key > self.cfg.n_max:
            return
        _keep_better(self.table, key, profile_cost(prof, length), tuple(entries), resources)

    def _fits(self, length: int, resources: float, j: int, count: int) -> bool:
        return length + count <= self.cfg.m_max and resources + count * self.weights[j] <= self.limit

    def walk(self, start: int, entries: List[int], prof: np.ndarray, resources: float, min_count: int) -> None:
        self._emit(entries, prof, resources, min_count)
        for j in range(start, len(self.values)):
            # weights grow with the value, so once a block does not fit neither do later ones
            count = self.cfg.min_repetitions
            if not self._fits(len(entries), resources, j, count):
                break
            v, w = self.values[j], self.weights[j]
            p = prof
            for _ in range(count):
                p = _gate(p, v)
            while True:
                self.walk(j + 1, entries + [v] * count, p, resources + count * w, min(min_count, count))
                count += 1
                if not self._fits(len(entries), resources, j, count):
                    break
                p = _gate(p, v)


def _top_level_tasks(cfg: SearchConfig, weights: Sequence[float]) -> List[Tuple[int, int]]:
    """(value index, count) pairs for the smallest entry of each vector."""
    tasks = []
    for j, w in enumerate(weights):
        count = cfg.min_repetitions
        if count * w > cfg.n_max + RESOURCE_SLACK or count > cfg.m_max:
            break
        while count * w <= cfg.n_max + RESOURCE_SLACK and count <= cfg.m_max:
            tasks.append((j, count))
            count += 1
    return tasks


def _walk_branch(cfg: SearchConfig, values: Sequence[int], weights: Sequence[float], j: int, count: int) -> _Table:
    walker = _Walker(cfg, values, weights)
    prof = np.ones(1, dtype=np.int64)
    for _ in range(count):
        prof = _gate(prof, values[j])
    walker.walk(j + 1, [values[j]] * count, prof, count * weights[j], count)
    return walker.table


def _merge(tables: Sequence[_Table]) -> _Table:
    merged: _Table = {}
    for table in tables:
        for key, (cost, entries, resources) in table.items():
            _keep_better(merged, key, cost, entries, resources)
    return merged


def _check_search_config(cfg: SearchConfig) -> None:
    cap = get_settings().search_max_qubits
    if cfg.m_max > cap:
        raise ResourceLimitError(f"m_max={cfg.m_max} exceeds the search cap of {cap} qubits (KPL_SEARCH_MAX_QUBITS)")
    if cfg.min_repetitions > cfg.m_max:
        raise KitaevLabError(f"infeasible constraints: min_repetitions={cfg.min_repetitions} > m_max={cfg.m_max}")


def _run_enumeration(cfg: SearchConfig, eta: float, threads: Optional[int]) -> SearchResult:
    _check_search_config(cfg)
    values = cfg.alphabet_values()
    weights = [qubit_charge(v, eta) for v in values]
    fitting = [
        (v, w)
        for v, w in zip(values, weights)
        if math.isfinite(w) and w * cfg.min_repetitions <= cfg.n_max + RESOURCE_SLACK
    ]
    if not fitting:
        raise KitaevLabError(f"empty alphabet: no {cfg.alphabet.value} multiplicity fits a budget of {cfg.n_max}")
    values, weights = [v for v, _ in fitting], [w for _, w in fitting]

    threads = get_settings().threads if threads is None else threads
    tasks = _top_level_tasks(cfg, weights)
    logger.info(
        f"🔍 Searching N in [{cfg.n_min}, {cfg.n_max}] over {cfg.alphabet.value} "
        f"(eta={eta}, {len(tasks)} branches, {threads} workers)"
    )
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(_walk_branch, cfg, values, weights, j, count) for j, count in tasks]
            tables = [f.result() for f in futures]
    else:
        tables = [_walk_branch(cfg, values, weights, j, count) for j, count in tasks]
    merged = _merge(tables)

    entries = tuple(
        SearchEntry(
            n_key=key,
            resources=resources,
            vector=MultiplicityVector(entries=vector),
            cost=cost,
            ratio=cost / optimum_cost(key),
        )
        for key, (cost, vector, resources) in sorted(merged.items())
    )
    logger.info(f"✅ Search filled {len(entries)} buckets")
    return SearchResult(entries=entries, eta=eta)


def search_constrained(cfg: SearchConfig, threads: Optional[int] = None) -> SearchResult:
    """Best vector per N in [n_min, n_max] under the alphabet and repetition rules."""
    return _run_enumeration(cfg, 1.0, threads)


def search_lossy(cfg: SearchConfig, eta: float, threads: Optional[int] = None) -> SearchResult:
    """
    Same walk with each qubit charged m/η^m. Candidates are keyed by
    ceil(adjusted resources) and keep their noiseless cost.
    """
    if not (0.0 < eta <= 1.0) or math.isnan(eta):
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    return _run_enumeration(cfg, float(eta), threads)


def run_search(cfg: SearchConfig, eta: float = 1.0, threads: Optional[int] = None) -> SearchResult:
    """Dispatch on cfg.strategy."""
    if cfg.strategy == SearchStrategy.EXHAUSTIVE:
        if eta != 1.0:
            raise KitaevLabError("exhaustive search is noiseless only; use the constrained strategy with eta")
        entries = []
        for n in range(cfg.n_min, cfg.n_max + 1):
            report = search_exhaustive(n, limit=cfg.exhaustive_limit)
            entries.append(
                SearchEntry(
                    n_key=n,
                    resources=float(n),
                    vector=report.vector,
                    cost=report.cost,
                    ratio=report.optimum_ratio,
                )
            )
        return SearchResult(entries=tuple(entries))
    if eta == 1.0:
        return search_constrained(cfg, threads=threads)
    return search_lossy(cfg, eta, threads=threads)


def multiplicity_intuition_violations(lossier: SearchResult, clearer: SearchResult) -> List[int]:
    """Shared buckets where the lossier setup's best vector has the larger top multiplicity."""
    violations = []
    for entry in lossier.entries:
        other = clearer.best_at(entry.n_key)
        if other is None:
            continue
        if max(entry.vector.entries) > max(other.vector.entries):
            violations.append(entry.n_key)
    return violations


# ============= Qubit-count accounting =============

class _QubitSearch:
    """
    Branch and bound over nondecreasing length-M vectors with entries <= cap.

    Entries after a prefix are >= its last entry e, so J(0..e-1) is already
    fixed. With J(0) = J(N) = 1 the roughness is 1 + ½ Σ (√J(n) - √J(n+1))²,
    and the fixed low pairs appear twice (mirrored) as long as one more
    entry follows, which gives the bound used for pruning.
    """

    def __init__(self, m_count: int, cap: int):
        self.m_count = m_count
        self.cap = cap
        self.kitaev = kitaev_vector(m_count).entries
        self.best = profile_roughness(np.ones(2 ** m_count, dtype=np.int64), m_count)
        self.minimizers: List[Tuple[int, ...]] = [self.kitaev]
        self.evaluated = 1
        self.pruned = 0

    def _low_range_sums(self, prof: np.ndarray) -> np.ndarray:
        """sums[k] = Σ_{n<k} (√J(n) - √J(n+1))², J zero-padded to cap + 1."""
        roots = np.zeros(self.cap + 1)
        head = prof[: self.cap + 1]
        roots[: len(head)] = np.sqrt(head.astype(np.float64))
        return np.concatenate(([0.0], np.cumsum(np.diff(roots) ** 2)))

    def _record(self, entries: Tuple[int, ...], rough: float) -> None:
        if rough < self.best - TIE_TOLERANCE:
            self.best = rough
            self.minimizers = [entries]
        elif rough <= self.best + TIE_TOLERANCE:
            self.minimizers.append(entries)

    def walk(self, prefix: List[int], prof: np.ndarray, last: int) -> None:
        leaf = len(prefix) + 1 == self.m_count
        # both halves of the bound only hold while another entry follows
        weight = 0.5 if leaf else 1.0
        sums = self._low_range_sums(prof)
        for e in range(last, self.cap + 1):
            # J(0..e-1) of the extension equals the prefix's, and the bound grows with e
            if 1.0 + weight * sums[e - 1] > self.best + TIE_TOLERANCE:
                self.pruned += self.cap - e + 1
                break
            entries = prefix + [e]
            extended = _gate(prof, e)
            if leaf:
                if tuple(entries) == self.kitaev:
                    continue
                self.evaluated += 1
                self._record(tuple(entries), profile_roughness(extended, self.m_count))
            else:
                self.walk(entries, extended, e)


def find_qubit_minimizers(m_count: int, entry_cap: Optional[int] = None) -> QubitOptimalityReport:
    """All minimum-cost vectors of exactly m_count qubits with entries in [1, entry_cap]."""
    if m_count < 1:
        raise ValueError("m_count must be >= 1")
    if m_count > QUBIT_SEARCH_LIMIT:
        raise ResourceLimitError(f"qubit-count enumeration is limited to M <= {QUBIT_SEARCH_LIMIT}, got {m_count}")
    cap = 2 ** m_count if entry_cap is None else entry_cap
    if cap < 2 ** (m_count - 1):
        raise KitaevLabError(f"entry cap {cap} is too small to include the Kitaev vector (needs >= {2 ** (m_count - 1)})")

    search = _QubitSearch(m_count, cap)
    search.walk([], np.ones(1, dtype=np.int64), 1)
    minimizers = tuple(MultiplicityVector(entries=e) for e in sorted(search.minimizers))
    report = QubitOptimalityReport(
        m_count=m_count,
        entry_cap=cap,
        minimizers=minimizers,
        min_cost=math.ldexp(search.best, 1 - m_count),
        evaluated=search.evaluated,
        pruned=search.pruned,
    )
    logger.info(
        f"{'✅' if report.passed else '❌'} M={m_count}, cap={cap}: {len(minimizers)} minimizer(s), "
        f"{search.evaluated} evaluated, {search.pruned} pruned"
    )
    return report


def verify_kitaev_qubit_optimality(m_count: int, entry_cap: Optional[int] = None) -> bool:
    return find_qubit_minimizers(m_count, entry_cap).passed
