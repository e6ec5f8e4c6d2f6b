"""
Pydantic schemas for the shared domain types.

Every model is frozen, so instances can be hashed, cached and shipped to
worker processes without copies drifting apart.
"""

import math
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Numerical tolerance for "no strategy beats the entangled optimum".
OPTIMUM_TOLERANCE = 1e-10

# Minimum repetitions per multiplicity for long vectors: (min_length, min_reps).
REPETITION_TIERS: Tuple[Tuple[int, int], ...] = ((21, 2), (26, 3))


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


# ============= Multiplicity vectors =============

class MultiplicityVector(FrozenModel):
    """Per-qubit phase-gate counts m = (m_0, ..., m_{M-1})."""

    entries: Tuple[int, ...] = ()

    @field_validator("entries")
    @classmethod
    def _positive_entries(cls, entries: Tuple[int, ...]) -> Tuple[int, ...]:
        for i, m in enumerate(entries):
            if m < 1:
                raise ValueError(f"entry {i} is {m}; gate multiplicities must be >= 1")
        return entries

    @classmethod
    def of(cls, entries: Iterable[int]) -> "MultiplicityVector":
        return cls(entries=tuple(int(m) for m in entries))

    @classmethod
    def parse(cls, text: str, separator: str = ",") -> "MultiplicityVector":
        """Parse "1,2,4" (or "1|2|4" with separator="|"); the empty string is the empty vector."""
        text = text.strip()
        if not text:
            return cls()
        entries = []
        for token in text.split(separator):
            token = token.strip()
            try:
                entries.append(int(token))
            except ValueError:
                raise ValueError(f"invalid multiplicity entry {token!r}") from None
        return cls(entries=tuple(entries))

    @property
    def n_total(self) -> int:
        return sum(self.entries)

    @property
    def m_count(self) -> int:
        return len(self.entries)

    def to_csv_field(self) -> str:
        return "|".join(str(m) for m in self.entries)

    def __str__(self) -> str:
        return ",".join(str(m) for m in self.entries)


VectorLike = Union[MultiplicityVector, Sequence[int]]


def as_vector(v: VectorLike) -> MultiplicityVector:
    if isinstance(v, MultiplicityVector):
        return v
    return MultiplicityVector.of(v)


def canonicalize(v: VectorLike) -> MultiplicityVector:
    """Nondecreasing form of v. Costs depend on the multiset only."""
    vector = as_vector(v)
    return MultiplicityVector(entries=tuple(sorted(vector.entries)))


def kitaev_vector(m_count: int) -> MultiplicityVector:
    """Standard Kitaev vector (1, 2, ..., 2^{M-1})."""
    if m_count < 0:
        raise ValueError("m_count must be >= 0")
    return MultiplicityVector(entries=tuple(2 ** i for i in range(m_count)))


def repeated_kitaev_vector(m_count: int, repetitions: int) -> MultiplicityVector:
    """Every power of two of the Kitaev vector repeated `repetitions` times, sorted."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if m_count < 0 or m_count % repetitions:
        raise ValueError(f"m_count={m_count} is not a multiple of {repetitions}")
    levels = m_count // repetitions
    return MultiplicityVector(entries=tuple(2 ** i for i in range(levels) for _ in range(repetitions)))


def doubled_vector(m_count: int) -> MultiplicityVector:
    return repeated_kitaev_vector(m_count, 2)


def tripled_vector(m_count: int) -> MultiplicityVector:
    return repeated_kitaev_vector(m_count, 3)


def product_vector(n_total: int) -> MultiplicityVector:
    """N single-pass qubits, the shot-noise benchmark."""
    if n_total < 0:
        raise ValueError("n_total must be >= 0")
    return MultiplicityVector(entries=(1,) * n_total)


# ============= Profiles =============

class PhaseProfile(FrozenModel):
    """Multiplicity histogram J(0..N) of a strategy with M qubits."""

    n_total: int = Field(ge=0)
    m_count: int = Field(ge=0)
    counts: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_invariants(self) -> "PhaseProfile":
        counts = self.counts
        if len(counts) != self.n_total + 1:
            raise ValueError(f"expected {self.n_total + 1} counts, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if sum(counts) != 2 ** self.m_count:
            raise ValueError(f"counts sum to {sum(counts)}, expected 2^{self.m_count}")
        if counts[0] < 1 or counts[-1] < 1:
            raise ValueError("J(0) and J(N) must be >= 1")
        if counts != counts[::-1]:
            raise ValueError("profile is not symmetric under n -> N - n")
        return self

    def reversed(self) -> "PhaseProfile":
        return PhaseProfile(n_total=self.n_total, m_count=self.m_count, counts=self.counts[::-1])


# ============= Cost =============

class SeedOffDiagonals(FrozenModel):
    """Real first off-diagonal band r(n) = Π_{n,n+1} of the seed operator."""

    values: Tuple[float, ...]

    @field_validator("values")
    @classmethod
    def _bounded(cls, values: Tuple[float, ...]) -> Tuple[float, ...]:
        for i, r in enumerate(values):
            if not math.isfinite(r) or abs(r) > 1.0:
                raise ValueError(f"off-diagonal {i} is {r}; positivity requires |r| <= 1")
        return values

    @classmethod
    def ones(cls, length: int) -> "SeedOffDiagonals":
        return cls(values=(1.0,) * length)


class CostReport(FrozenModel):
    vector: MultiplicityVector
    n_total: int
    m_count: int
    cost: float
    optimum_ratio: float

    @model_validator(mode="after")
    def _check_ranges(self) -> "CostReport":
        if not (-OPTIMUM_TOLERANCE <= self.cost <= 2.0 + OPTIMUM_TOLERANCE):
            raise ValueError(f"cost {self.cost} outside [0, 2]")
        if self.optimum_ratio < 1.0 - OPTIMUM_TOLERANCE:
            raise ValueError(f"ratio {self.optimum_ratio} beats the entangled optimum")
        return self


# ============= Loss =============

class LossMode(str, Enum):
    EXACT = "exact"
    RESOURCE = "resource"


class LossConfig(FrozenModel):
    """Per-gate transmission eta and the evaluation mode."""

    eta: float = Field(gt=0.0, le=1.0)
    mode: LossMode = LossMode.EXACT


# ============= Search =============

class Alphabet(str, Enum):
    POWERS_OF_TWO = "pow2"
    ANY_POSITIVE = "any"


class SearchStrategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    CONSTRAINED = "constrained"


class SearchConfig(FrozenModel):
    n_min: int = Field(default=1, ge=1)
    n_max: int = Field(ge=1)
    alphabet: Alphabet = Alphabet.POWERS_OF_TWO
    min_repetitions: int = Field(default=1, ge=1)
    m_max: int = Field(default=32, ge=1)
    strategy: SearchStrategy = SearchStrategy.CONSTRAINED
    repetition_tiers: Tuple[Tuple[int, int], ...] = ()
    exhaustive_limit: int = Field(default=24, ge=0)

    @model_validator(mode="after")
    def _check_budget(self) -> "SearchConfig":
        if self.n_max < self.n_min:
            raise ValueError(f"n_max={self.n_max} < n_min={self.n_min}")
        if self.strategy == SearchStrategy.EXHAUSTIVE and self.n_max > self.exhaustive_limit:
            raise ValueError(
                f"exhaustive search is limited to N <= {self.exhaustive_limit}, got n_max={self.n_max}"
            )
        for min_length, min_reps in self.repetition_tiers:
            if min_length < 1 or min_reps < 1:
                raise ValueError(f"invalid repetition tier ({min_length}, {min_reps})")
        return self

    def alphabet_values(self) -> List[int]:
        if self.alphabet == Alphabet.POWERS_OF_TWO:
            return [2 ** k for k in range(self.n_max.bit_length()) if 2 ** k <= self.n_max]
        return list(range(1, self.n_max + 1))

    def required_repetitions(self, length: int) -> int:
        """Minimum count per distinct multiplicity for a vector of this length."""
        required = self.min_repetitions
        for min_length, min_reps in self.repetition_tiers:
            if length >= min_length:
                required = max(required, min_reps)
        return required


class SearchEntry(FrozenModel):
    """Best vector found in one resource bucket."""

    n_key: int
    resources: float
    vector: MultiplicityVector
    cost: float
    ratio: float


class SearchResult(FrozenModel):
    entries: Tuple[SearchEntry, ...] = ()
    eta: float = 1.0

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "SearchResult":
        keys = [e.n_key for e in self.entries]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ValueError("search table keys must be strictly increasing")
        return self

    def keys(self) -> List[int]:
        return [e.n_key for e in self.entries]

    def best_at(self, n_key: int) -> Optional[SearchEntry]:
        return next((e for e in self.entries if e.n_key == n_key), None)

    def envelope(self) -> List[Tuple[int, float]]:
        """Running minimum of cost: best achievable with at most n_key resources."""
        out = []
        best = math.inf
        for e in self.entries:
            best = min(best, e.cost)
            out.append((e.n_key, best))
        return out


class QubitOptimalityReport(FrozenModel):
    m_count: int
    entry_cap: int
    minimizers: Tuple[MultiplicityVector, ...]
    min_cost: float
    evaluated: int
    pruned: int

    @property
    def passed(self) -> bool:
        return len(self.minimizers) == 1 and self.minimizers[0] == kitaev_vector(self.m_count)


# ============= Monte Carlo =============

class SimConfig(FrozenModel):
    vector: MultiplicityVector
    true_phase: float = 0.0
    samples: int = Field(ge=1)
    rng_seed: int = Field(default=0, ge=0)

    @field_validator("true_phase")
    @classmethod
    def _wrap_phase(cls, phi: float) -> float:
        if not math.isfinite(phi):
            raise ValueError("true_phase must be finite")
        wrapped = math.fmod(phi, 2 * math.pi)
        if wrapped < 0:
            wrapped += 2 * math.pi
        # fmod of a value just below a multiple of 2π can round up to 2π
        return 0.0 if wrapped >= 2 * math.pi else wrapped


class SimulationResult(FrozenModel):
    config: SimConfig
    mean_cost: float
    std_error: float
    analytic: float
    acceptance_rate: float
    max_density: float


# ============= Plots =============

class Series(FrozenModel):
    label: str
    points: Tuple[Tuple[float, float], ...]
    style: str = "line"  # line | points | dashed


class PlotSpec(FrozenModel):
    title: str = ""
    x_label: str = "N"
    y_label: str = "cost"
    series: Tuple[Series, ...]
    log_log: bool = True
    output_path: Optional[str] = None

    @model_validator(mode="after")
    def _positive_for_log(self) -> "PlotSpec":
        if self.log_log:
            for s in self.series:
                for x, y in s.points:
                    if x <= 0 or y <= 0:
                        raise ValueError(f"series {s.label!r} has a nonpositive point ({x}, {y}) on log axes")
        return self


class NearOptimalityReport(FrozenModel):
    """Exhaustive best/optimum ratios over a range of N."""

    rows: Tuple[CostReport, ...]
    soft_target: float = 1.02
    hard_bound: float = 1.05

    @property
    def max_ratio(self) -> float:
        return max((r.optimum_ratio for r in self.rows), default=1.0)

    @property
    def worst(self) -> Optional[CostReport]:
        return max(self.rows, key=lambda r: r.optimum_ratio, default=None)

    @property
    def within_soft_target(self) -> bool:
        return self.max_ratio <= self.soft_target

    @property
    def within_hard_bound(self) -> bool:
        return self.max_ratio <= self.hard_bound
