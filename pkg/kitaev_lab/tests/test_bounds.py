import math
import os
import sys

import pytest

# Ensure kitaev_lab package is found
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from kitaev_lab.bounds import (
    bound_curves,
    bound_doubled,
    bound_tripled,
    cost_kitaev_closed,
    is_doubled_shape,
    is_kitaev_shape,
    is_tripled_shape,
    lossy_general_bound,
    lossy_unentangled_asymptote,
    tripled_ratio_table,
    tripled_sum_lower_bound,
)
from kitaev_lab.cost import optimal_cost, optimum_cost
from kitaev_lab.errors import ShapeError
from kitaev_lab.profile import compute_profile, profile_doubled
from kitaev_lab.schemas import tripled_vector


class TestShapes:
    def test_doubled(self):
        assert [n for n in range(1, 65) if is_doubled_shape(n)] == [2, 6, 14, 30, 62]

    def test_tripled(self):
        assert [n for n in range(1, 50) if is_tripled_shape(n)] == [3, 9, 21, 45]

    def test_kitaev(self):
        assert [n for n in range(1, 40) if is_kitaev_shape(n)] == [1, 3, 7, 15, 31]


@pytest.mark.parametrize("n_total, expected", [(2, 0.923287), (6, 0.274143), (30, 0.0225492)])
def test_bound_doubled_values(n_total, expected):
    assert bound_doubled(n_total) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("n_total, expected", [(3, 0.5), (9, 0.15625), (21, 0.042969)])
def test_bound_tripled_values(n_total, expected):
    assert bound_tripled(n_total) == pytest.approx(expected, abs=1e-6)


def test_off_shape_rejected():
    with pytest.raises(ShapeError):
        bound_doubled(5)
    with pytest.raises(ShapeError):
        bound_tripled(6)
    with pytest.raises(ShapeError):
        cost_kitaev_closed(6)


def test_kitaev_closed():
    assert cost_kitaev_closed(7) == 0.25
    assert cost_kitaev_closed(0) == 2.0


@pytest.mark.parametrize("m_count", range(2, 31, 2))
def test_doubled_cost_below_bound(m_count):
    p = profile_doubled(m_count)
    assert optimal_cost(p) <= bound_doubled(p.n_total) + 1e-12


@pytest.mark.parametrize("m_count", range(3, 31, 3))
def test_tripled_cost_below_bound(m_count):
    p = compute_profile(tripled_vector(m_count))
    assert optimal_cost(p) <= bound_tripled(p.n_total) + 1e-12


def test_tripled_bound_has_heisenberg_scaling():
    for k in range(1, 40):
        n_total = 3 * (2 ** k - 1)
        assert n_total ** 2 * bound_tripled(n_total) <= 27.0


def test_tripled_cost_has_heisenberg_scaling():
    scaled = [r["N"] ** 2 * r["cost"] for r in tripled_ratio_table(30)]
    assert len(scaled) == 10
    assert all(s <= 27.0 for s in scaled)
    # climbs from N=3 rather than settling from above
    assert scaled[0] == pytest.approx(3.456, abs=1e-3)
    assert scaled[-1] == pytest.approx(10.25, abs=0.01)


@pytest.mark.parametrize("m_count", [3, 6, 9, 12])
def test_tripled_sum_lower_bound_holds(m_count):
    counts = compute_profile(tripled_vector(m_count)).counts
    exact = math.fsum(math.sqrt(a * b) for a, b in zip(counts, counts[1:]))
    assert exact >= tripled_sum_lower_bound(m_count)


def test_tripled_ratio_table():
    rows = tripled_ratio_table(9)
    assert [r["M"] for r in rows] == [3, 6, 9]
    assert [r["N"] for r in rows] == [3, 9, 21]
    for r in rows:
        assert r["ratio"] == pytest.approx(r["cost"] / r["optimum"])
        assert r["ratio"] >= 1.0


class TestLossyCurves:
    def test_asymptote(self):
        assert lossy_unentangled_asymptote(0.9, 100) == pytest.approx(0.0028640, abs=1e-7)
        assert lossy_unentangled_asymptote(0.9, 50) == pytest.approx(math.e * math.log(10 / 9) / 50)

    def test_asymptote_needs_loss(self):
        with pytest.raises(ValueError):
            lossy_unentangled_asymptote(1.0, 10)

    @pytest.mark.parametrize("eta", [k / 20 for k in range(1, 20)])
    def test_general_bound_below_asymptote(self, eta):
        for n_total in (1, 7, 100, 1000.5):
            assert lossy_general_bound(eta, n_total) <= lossy_unentangled_asymptote(eta, n_total)

    def test_general_bound(self):
        assert lossy_general_bound(0.9, 100) == pytest.approx(1 / 900)
        assert lossy_general_bound(1.0, 10) == 0.0
        with pytest.raises(ValueError):
            lossy_general_bound(0.5, 0)


def test_bound_curves_match_pointwise_functions():
    curves = bound_curves([2, 6, 7])
    assert set(curves) == {"optimum", "kitaev", "bound_m2", "bound_m3"}
    assert curves["optimum"][2] == (7.0, pytest.approx(optimum_cost(7)))
    assert curves["bound_m2"][1][1] == pytest.approx(bound_doubled(6))
    assert curves["kitaev"][2][1] == pytest.approx(0.25)
