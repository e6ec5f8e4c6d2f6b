import math
import os
import sys

import pytest

# Ensure kitaev_lab package is found
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from kitaev_lab.bounds import bound_doubled, lossy_general_bound, lossy_unentangled_asymptote
from kitaev_lab.cost import optimum_cost
from kitaev_lab.errors import KitaevLabError, ResourceLimitError
from kitaev_lab.schemas import (
    OPTIMUM_TOLERANCE,
    REPETITION_TIERS,
    Alphabet,
    MultiplicityVector,
    SearchConfig,
    SearchEntry,
    SearchResult,
    SearchStrategy,
)
from kitaev_lab.search import (
    _beats,
    find_qubit_minimizers,
    int_partitions,
    multiplicity_intuition_violations,
    near_optimality_report,
    run_search,
    search_constrained,
    search_exhaustive,
    search_lossy,
    verify_kitaev_qubit_optimality,
)
from kitaev_lab.settings import Settings, set_settings


@pytest.fixture(autouse=True)
def default_settings():
    set_settings(Settings())
    yield
    set_settings(None)


def test_partitions_are_nondecreasing_and_complete():
    parts = list(int_partitions(6))
    assert len(parts) == 11
    assert len(set(parts)) == 11
    for p in parts:
        assert sum(p) == 6
        assert list(p) == sorted(p)


class TestExhaustive:
    @pytest.mark.parametrize(
        "n, vector, cost",
        [
            (1, (1,), 1.0),
            (2, (1, 1), 2.0 - math.sqrt(2.0)),
            (3, (1, 1, 1), 0.383975),
        ],
    )
    def test_small_n(self, n, vector, cost):
        r = search_exhaustive(n)
        assert r.vector.entries == vector
        assert r.cost == pytest.approx(cost, abs=1e-6)

    def test_zero_is_empty_vector(self):
        r = search_exhaustive(0)
        assert r.vector.entries == ()
        assert r.cost == 2.0

    def test_limit(self):
        with pytest.raises(ResourceLimitError, match="KPL_EXHAUSTIVE_LIMIT"):
            search_exhaustive(25)
        with pytest.raises(ResourceLimitError):
            search_exhaustive(10, limit=8)

    def test_near_optimality(self):
        report = near_optimality_report(4, 20)
        assert len(report.rows) == 17
        assert report.within_hard_bound
        for row in report.rows:
            assert row.optimum_ratio >= 1.0 - OPTIMUM_TOLERANCE
        # N=4 has no vector closer than (1,1,1,1), about 2.7% above the optimum
        assert report.rows[0].vector.entries == (1, 1, 1, 1)


class TestConstrained:
    def test_any_alphabet_matches_oracle(self):
        result = search_constrained(SearchConfig(n_max=16, alphabet=Alphabet.ANY_POSITIVE))
        assert result.keys() == list(range(1, 17))
        for entry in result.entries:
            assert entry.cost == pytest.approx(search_exhaustive(entry.n_key).cost, abs=1e-12)

    def test_powers_of_two_against_oracle(self):
        result = search_constrained(SearchConfig(n_max=20))
        for entry in result.entries:
            oracle = search_exhaustive(entry.n_key)
            assert entry.cost >= oracle.cost - 1e-12
            if all(m & (m - 1) == 0 for m in oracle.vector.entries):
                assert entry.cost == pytest.approx(oracle.cost, abs=1e-12)

    def test_n7_at_least_as_good_as_kitaev(self):
        result = search_constrained(SearchConfig(n_min=7, n_max=7))
        assert result.keys() == [7]
        assert result.best_at(7).cost <= 0.25

    def test_envelope_is_monotone(self):
        result = search_constrained(SearchConfig(n_max=40))
        costs = [c for _, c in result.envelope()]
        assert all(a >= b for a, b in zip(costs, costs[1:]))

    def test_table_respects_optimum(self):
        result = search_constrained(SearchConfig(n_max=40))
        for entry in result.entries:
            assert entry.cost >= optimum_cost(entry.n_key) - OPTIMUM_TOLERANCE
            assert entry.ratio == pytest.approx(entry.cost / optimum_cost(entry.n_key))

    def test_double_repetitions(self):
        result = search_constrained(SearchConfig(n_max=14, min_repetitions=2))
        for entry in result.entries:
            counts = [entry.vector.entries.count(m) for m in set(entry.vector.entries)]
            assert min(counts) >= 2
        assert result.best_at(6).cost <= bound_doubled(6)
        assert result.best_at(14).cost <= bound_doubled(14)
        assert result.best_at(1) is None

    def test_repetition_tiers_apply_to_long_vectors(self):
        cfg = SearchConfig(n_max=30, repetition_tiers=REPETITION_TIERS)
        for entry in search_constrained(cfg).entries:
            counts = [entry.vector.entries.count(m) for m in set(entry.vector.entries)]
            assert min(counts) >= cfg.required_repetitions(entry.vector.m_count)

    def test_deterministic(self):
        cfg = SearchConfig(n_max=30)
        assert search_constrained(cfg) == search_constrained(cfg)

    def test_workers_do_not_change_the_table(self):
        cfg = SearchConfig(n_max=30, alphabet=Alphabet.ANY_POSITIVE, m_max=12)
        assert search_constrained(cfg, threads=2) == search_constrained(cfg, threads=1)

    def test_infeasible(self):
        with pytest.raises(KitaevLabError, match="infeasible"):
            search_constrained(SearchConfig(n_max=10, min_repetitions=5, m_max=3))

    def test_length_cap(self):
        with pytest.raises(ResourceLimitError, match="KPL_SEARCH_MAX_QUBITS"):
            search_constrained(SearchConfig(n_max=10, m_max=40))

    def test_exhaustive_strategy(self):
        result = run_search(SearchConfig(n_min=2, n_max=5, strategy=SearchStrategy.EXHAUSTIVE))
        assert result.keys() == [2, 3, 4, 5]
        assert result.best_at(3).vector.entries == (1, 1, 1)
        with pytest.raises(KitaevLabError):
            run_search(SearchConfig(n_max=5, strategy=SearchStrategy.EXHAUSTIVE), eta=0.9)


class TestLossy:
    def test_lossless_limit(self):
        cfg = SearchConfig(n_max=25)
        assert search_lossy(cfg, 1.0).entries == search_constrained(cfg).entries

    def test_keys_are_ceiled_resources(self):
        result = search_lossy(SearchConfig(n_max=40), 0.9)
        assert result.eta == 0.9
        for entry in result.entries:
            assert entry.n_key - 1 < entry.resources <= entry.n_key + 1e-9

    def test_costs_above_general_bound(self):
        result = search_lossy(SearchConfig(n_max=60), 0.9)
        assert result.entries
        for entry in result.entries:
            assert entry.cost >= lossy_general_bound(0.9, entry.resources)

    def test_underflowing_charges_leave_the_alphabet(self):
        result = search_lossy(SearchConfig(n_max=1000), 0.1)
        assert result.entries
        for entry in result.entries:
            assert set(entry.vector.entries) <= {1, 2}

    @pytest.mark.parametrize("eta", [0.5, 0.9])
    def test_large_budget_tracks_the_asymptote(self, eta):
        result = search_lossy(SearchConfig(n_max=1000, m_max=32), eta)
        tail = [e for e in result.entries if e.resources >= 100]
        assert tail
        for entry in result.entries:
            assert entry.cost >= lossy_general_bound(eta, entry.resources)
        for entry in tail:
            assert 0.5 <= entry.cost / lossy_unentangled_asymptote(eta, entry.resources) <= 2.0

    def test_empty_alphabet(self):
        with pytest.raises(KitaevLabError, match="empty alphabet"):
            search_lossy(SearchConfig(n_max=5), 0.1)

    def test_eta_range(self):
        with pytest.raises(ValueError):
            search_lossy(SearchConfig(n_max=5), 0.0)


def test_near_ties_go_to_the_smaller_vector():
    assert _beats(0.5 + 1e-14, (1, 1), (0.5, (1, 2)))
    assert not _beats(0.5, (1, 2), (0.5 + 1e-14, (1, 1)))
    assert _beats(0.4, (2,), (0.5, (1,)))
    assert not _beats(0.5 + 1e-9, (1,), (0.5, (2,)))
    assert _beats(0.5, (1,), None)


def test_multiplicity_intuition_violations():
    def table(*rows):
        return SearchResult(
            entries=tuple(
                SearchEntry(n_key=n, resources=float(n), vector=MultiplicityVector.of(v), cost=0.5, ratio=1.0)
                for n, v in rows
            )
        )

    lossier = table((4, (1, 1, 2)), (5, (1, 4)))
    clearer = table((4, (1, 1, 2)), (5, (1, 2, 2)), (6, (2, 4)))
    assert multiplicity_intuition_violations(lossier, clearer) == [5]


class TestQubitOptimality:
    @pytest.mark.parametrize("m_count, cap", [(1, 1), (2, 4), (3, 8)])
    def test_small_examples(self, m_count, cap):
        assert verify_kitaev_qubit_optimality(m_count, cap)

    def test_unique_minimizer(self):
        report = find_qubit_minimizers(3, 8)
        assert [v.entries for v in report.minimizers] == [(1, 2, 4)]
        assert report.min_cost == pytest.approx(0.25)
        assert report.passed

    @pytest.mark.parametrize("m_count", range(1, 9))
    def test_default_cap(self, m_count):
        report = find_qubit_minimizers(m_count)
        assert report.entry_cap == 2 ** m_count
        assert report.passed
        assert report.min_cost == pytest.approx(2.0 / 2 ** m_count)

    def test_larger_cap_still_passes(self):
        assert verify_kitaev_qubit_optimality(4, 64)

    def test_cap_too_small(self):
        with pytest.raises(KitaevLabError, match="too small"):
            find_qubit_minimizers(4, 7)

    def test_qubit_limit(self):
        with pytest.raises(ResourceLimitError):
            find_qubit_minimizers(13)
