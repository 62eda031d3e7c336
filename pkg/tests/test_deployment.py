import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetcache.capacity import capacity
from hetcache.deployment import (
    DEFAULT_DENSITY_GRID,
    CostModel,
    backhaul_trade,
    calibrate_sbs_backhaul,
    caching_station_capacity,
    optimize_sbs_density_backhaul,
    optimize_sbs_density_caching_station,
    required_cache_budget,
)
from hetcache.errors import DomainError, HetCacheError, InvalidParameterError, RegimeError
from hetcache.popularity import NO_HITS, inverse_cumulative_popularity
from hetcache.rates import UNBOUNDED, cap_loads


def test_no_budget_needed_at_1p2_gbps(table3, zipf):
    assert required_cache_budget(table3, zipf, 1.2e9) == 0.0


@pytest.mark.parametrize("u", [0.0, 1e-3, 1.0])
def test_zero_backhaul_limit(table3, zipf, u):
    caps = cap_loads(table3, strict=False)
    want = table3.sbs_density * inverse_cumulative_popularity(zipf, caps.sr / (caps.mr + caps.sr))
    assert required_cache_budget(table3, zipf, u) == pytest.approx(want, rel=1e-12)


def test_more_backhaul_needs_less_cache(table3, zipf):
    assert required_cache_budget(table3, zipf, 0.2e9) > required_cache_budget(table3, zipf, 0.8e9)


def test_trade_curve_nonincreasing_and_hits_zero(table3, zipf):
    curve = backhaul_trade(table3, zipf, np.linspace(0.0, 1.5e9, 61))
    assert np.all(np.diff(curve.required_budget) <= 1e-9)
    for u, c in zip(curve.u_sbh, curve.required_budget):
        caps = cap_loads(table3.replace(sbs_backhaul=float(u)), strict=False)
        assert (c == 0.0) == (caps.sbh >= caps.sr)


def test_trade_negative_backhaul(table3, zipf):
    with pytest.raises(DomainError):
        required_cache_budget(table3, zipf, -1.0)


def test_trade_non_ideal_mbs_backhaul(table3, zipf):
    p = table3.replace(mbs_backhaul=0.2e9)
    with pytest.raises(RegimeError):
        required_cache_budget(p, zipf, 0.5e9)


@given(st.one_of(st.just(0.0), st.floats(1e-6, 0.01)), st.floats(0.05, 2.0),
       st.one_of(st.just(0.0), st.floats(1e-6, 1.0)), st.floats(0.05, 2.0),
       st.floats(1.0, 1e4), st.floats(1.0, 1e3))
def test_cost_inversion_round_trip(k_bh, zeta_bh, k_c, zeta_c, budget, rho):
    cost = CostModel(k_bh, zeta_bh, k_c, zeta_c, budget)
    u = cost.affordable_backhaul(rho)
    cs = cost.affordable_cache(rho)
    if budget < rho:
        assert u is None and cs is None
        return
    if k_bh > 0:
        assert cost.backhaul_cost(rho, u) == pytest.approx(budget, rel=1e-9)
    if k_c > 0:
        assert cost.caching_station_cost(rho, cs) == pytest.approx(budget, rel=1e-9)


@pytest.mark.parametrize("kwargs", [
    dict(k_bh=-1.0), dict(zeta_bh=0.0), dict(zeta_c=2.5), dict(budget=math.inf),
])
def test_cost_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        CostModel(**kwargs)


def test_free_backhaul_capacity_nondecreasing(table3, zipf):
    cost = CostModel(k_bh=0.0, budget=1e4)
    curve = optimize_sbs_density_backhaul(table3, zipf, cost, 200.0)
    assert np.all(np.isinf(curve.resource))
    mu = curve.capacity
    assert np.all(np.isfinite(mu))
    assert np.all(np.diff(mu) >= -1e-9 * mu[:-1])


def test_budget_equal_to_density_gives_zero_backhaul(table3, zipf):
    cost = CostModel(budget=50.0)
    curve = optimize_sbs_density_backhaul(table3, zipf, cost, 200.0, [25.0, 50.0, 80.0])
    assert curve.resource[1] == 0.0
    assert np.isfinite(curve.capacity[1]) and curve.capacity[1] > 0
    # SBSs without backhaul serve hits only, so capacity is limited by the small cache
    assert curve.capacity[1] < curve.capacity[0]
    assert np.isnan(curve.resource[2]) and np.isnan(curve.capacity[2])


def test_backhaul_density_interior_optimum(table3, zipf):
    curve = optimize_sbs_density_backhaul(table3, zipf, CostModel(0.001, 0.5, budget=100.0), 200.0)
    assert curve.densities[0] < curve.best_density < curve.densities[-1]
    assert curve.unimodal
    k = int(np.nanargmax(curve.capacity))
    assert curve.best_capacity == curve.capacity[k]


def test_backhaul_density_all_unaffordable(table3, zipf):
    with pytest.raises(HetCacheError):
        optimize_sbs_density_backhaul(table3, zipf, CostModel(budget=10.0), 100.0, [20.0, 40.0])


def test_density_grid_validation(table3, zipf):
    with pytest.raises(DomainError):
        optimize_sbs_density_caching_station(table3, zipf, CostModel(), [])
    with pytest.raises(DomainError):
        optimize_sbs_density_caching_station(table3, zipf, CostModel(budget=0.0))


def test_default_grid():
    grid = np.asarray(DEFAULT_DENSITY_GRID)
    assert grid.size == 40 and grid[0] == pytest.approx(20.0) and grid[-1] == pytest.approx(200.0)
    assert np.allclose(np.diff(np.log(grid)), np.log(10) / 39)


def test_free_cache_fills_catalog(table3, zipf):
    curve = optimize_sbs_density_caching_station(table3, zipf, CostModel(k_c=0.0), [20.0, 50.0, 90.0])
    assert np.all(curve.resource == zipf.file_count)


def test_caching_station_zero_cache_is_no_cache_capacity(table3, zipf):
    caps = cap_loads(table3, strict=False)
    want = capacity(caps.replace(sbh=UNBOUNDED), NO_HITS, 0.0).mu
    assert caching_station_capacity(table3, zipf, 0.0) == pytest.approx(want, rel=1e-15)
    assert want == pytest.approx(min(caps.mr, caps.mbh), rel=1e-15)


def test_caching_station_dense_limit(table3, zipf):
    cost = CostModel(budget=100.0)
    curve = optimize_sbs_density_caching_station(table3, zipf, cost, [100.0])
    assert curve.resource[0] == 0.0
    caps = cap_loads(table3.replace(sbs_density=100.0), strict=False)
    assert curve.capacity[0] == pytest.approx(min(caps.mr, caps.mbh), rel=1e-15)


def test_caching_station_interior_optimum(table3, zipf):
    curve = optimize_sbs_density_caching_station(table3, zipf, CostModel(k_c=0.1, zeta_c=0.5))
    assert curve.densities[0] < curve.best_density < curve.densities[-1]
    assert curve.unimodal


def test_calibration_brackets(table3, zipf):
    cal = calibrate_sbs_backhaul(table3, zipf)
    assert 820 <= cal.c_min <= 920 and 880 <= cal.c_max <= 980
    assert cal.residual == pytest.approx(
        math.sqrt(((cal.c_min - 870) ** 2 + (cal.c_max - 930) ** 2) / 2), rel=1e-12)
    # the gap between the thresholds barely moves with backhaul, so the fit cannot be exact
    assert cal.residual > 0
