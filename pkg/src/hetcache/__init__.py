"""Capacity-optimal cache deployment and traffic steering in two-tier cellular networks."""

from .capacity import CapacityBreakdown, TierLoadProfile, capacity, load_coefficients, load_profile
from .deployment import (
    CostModel,
    calibrate_sbs_backhaul,
    optimize_sbs_density_backhaul,
    optimize_sbs_density_caching_station,
    required_cache_budget,
)
from .errors import (
    CatalogTooSmallError,
    ConfigError,
    DomainError,
    HetCacheError,
    InfeasiblePartError,
    InvalidParameterError,
    LowSNRError,
    RegimeError,
)
from .montecarlo import InterferenceMode, SimConfig, empirical_capacity, empirical_rates, sample_realization
from .optimizer import (
    BackhaulRegime,
    OptimalPlan,
    Regime,
    classify_regime,
    grid_search,
    solve,
    solve_analytic,
    thresholds,
)
from .popularity import CacheAllocation, HitRates, PopularityModel, build_zipf, cumulative_popularity, hit_rates
from .presets import table3_params, table3_popularity
from .rates import LoadCaps, NetworkParams, cap_loads

__all__ = [
    "BackhaulRegime", "CacheAllocation", "CapacityBreakdown", "CatalogTooSmallError", "ConfigError",
    "CostModel", "DomainError", "HetCacheError", "HitRates", "InfeasiblePartError", "InterferenceMode",
    "InvalidParameterError", "LoadCaps", "LowSNRError", "NetworkParams", "OptimalPlan",
    "PopularityModel", "Regime", "RegimeError", "SimConfig", "TierLoadProfile", "build_zipf",
    "calibrate_sbs_backhaul", "cap_loads", "capacity", "classify_regime", "cumulative_popularity",
    "empirical_capacity", "empirical_rates", "grid_search", "hit_rates", "load_coefficients",
    "load_profile", "optimize_sbs_density_backhaul", "optimize_sbs_density_caching_station",
    "required_cache_budget", "sample_realization", "solve", "solve_analytic", "table3_params",
    "table3_popularity", "thresholds",
]
