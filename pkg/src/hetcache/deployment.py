"""Cost-driven deployment studies: cache/backhaul trading and SBS density choice.

Costs are per km² in units of one SBS's equipment cost. Backhaul capacity
enters the cost model in kbit/s and cache sizes in files, the scales at which
the cost constants are meaningful (``K·x^ζ`` of order one for a 1 Gbps link or
a 100-file cache).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .capacity import capacity
from .errors import DomainError, HetCacheError, InvalidParameterError, RegimeError
from .optimizer import thresholds_from_caps, classify_regime, BackhaulRegime, solve
from .popularity import PopularityModel, hit_rates_for
from .rates import UNBOUNDED, NetworkParams, cap_loads

KBPS = 1e3
DEFAULT_DENSITY_GRID = tuple(np.geomspace(20.0, 200.0, 40))


@dataclass(frozen=True)
class CostModel:
    k_bh: float = 0.001
    zeta_bh: float = 0.5
    k_c: float = 0.1
    zeta_c: float = 0.5
    budget: float = 100.0

    def __post_init__(self):
        for name in ("k_bh", "k_c", "budget"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be nonnegative and finite, got {value!r}")
        for name in ("zeta_bh", "zeta_c"):
            value = getattr(self, name)
            if not 0 < value <= 2:
                raise InvalidParameterError(f"{name} must lie in (0, 2], got {value!r}")

    def backhaul_cost(self, sbs_density: float, u_sbh: float) -> float:
        """Cost per km² of SBSs with backhaul ``u_sbh`` (bit/s)."""
        return sbs_density * (1 + self.k_bh * (u_sbh / KBPS) ** self.zeta_bh)

    def caching_station_cost(self, sbs_density: float, sbs_cache: float) -> float:
        return sbs_density * (1 + self.k_c * sbs_cache**self.zeta_c)

    def affordable_backhaul(self, sbs_density: float) -> float | None:
        """Backhaul (bit/s) that spends the budget exactly; None when SBSs alone exceed it."""
        spare = self.budget / sbs_density - 1
        if spare < 0:
            return None
        if self.k_bh == 0:
            return math.inf
        return KBPS * (spare / self.k_bh) ** (1 / self.zeta_bh)

    def affordable_cache(self, sbs_density: float) -> float | None:
        """Per-SBS cache (files) that spends the budget exactly; None when unaffordable."""
        spare = self.budget / sbs_density - 1
        if spare < 0:
            return None
        if self.k_c == 0:
            return math.inf
        return (spare / self.k_c) ** (1 / self.zeta_c)


def required_cache_budget(p: NetworkParams, model: PopularityModel, u_sbh: float) -> float:
    """Cache budget (files/km²) that lifts the SBS backhaul bottleneck at backhaul ``u_sbh``."""
    if u_sbh < 0:
        raise DomainError(f"backhaul capacity must be nonnegative, got {u_sbh!r}")
    caps = cap_loads(p.replace(sbs_backhaul=u_sbh), strict=False)
    regime = classify_regime(caps)
    if regime is BackhaulRegime.NON_IDEAL_MBH:
        raise RegimeError(f"MBS backhaul is not ideal (MR cap {caps.mr:.6g} > MBH cap {caps.mbh:.6g})")
    if regime is BackhaulRegime.IDEAL_MBH_UNCONSTRAINED_SBH:
        return 0.0
    return thresholds_from_caps(caps, model, p.mbs_density, p.sbs_density)[0]


@dataclass(frozen=True)
class TradeCurve:
    u_sbh: np.ndarray
    required_budget: np.ndarray


def backhaul_trade(p: NetworkParams, model: PopularityModel, u_grid) -> TradeCurve:
    u = np.asarray(u_grid, dtype=float)
    return TradeCurve(u, np.array([required_cache_budget(p, model, x) for x in u]))


@dataclass(frozen=True)
class DensityCurve:
    """Capacity against SBS density; infeasible densities carry NaN capacity.

    ``resource`` is the per-SBS quantity bought with the rest of the budget:
    backhaul in bit/s, or cache size in files for caching stations.
    """

    densities: np.ndarray
    resource: np.ndarray
    capacity: np.ndarray
    best_density: float
    best_capacity: float
    unimodal: bool


def _is_unimodal(values: np.ndarray) -> bool:
    """True when the curve rises then falls, both strictly somewhere."""
    v = values[np.isfinite(values)]
    if v.size < 3:
        return False
    peak = int(np.argmax(v))
    if peak == 0 or peak == v.size - 1:
        return False
    rtol = 1e-9 * abs(v[peak])
    return bool(np.all(np.diff(v[: peak + 1]) >= -rtol) and np.all(np.diff(v[peak:]) <= rtol))


def _finish(densities, resource, mu) -> DensityCurve:
    if not np.any(np.isfinite(mu)):
        raise HetCacheError("no SBS density on the grid is affordable and feasible")
    k = int(np.nanargmax(mu))
    return DensityCurve(densities, resource, mu, float(densities[k]), float(mu[k]), _is_unimodal(mu))


def _check_grid(rho_grid) -> np.ndarray:
    grid = np.asarray(rho_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise DomainError("density grid must be nonempty and positive")
    return grid


def optimize_sbs_density_backhaul(
    p_base: NetworkParams,
    model: PopularityModel,
    cost: CostModel,
    budget: float,
    rho_grid=DEFAULT_DENSITY_GRID,
) -> DensityCurve:
    """Capacity-optimal SBS density when each SBS's backhaul is bought from a fixed cost budget.

    ``budget`` is the cache budget in files/km².
    """
    if not cost.budget > 0:
        raise DomainError("cost budget must be positive")
    grid = _check_grid(rho_grid)
    resource = np.full(grid.size, np.nan)
    mu = np.full(grid.size, np.nan)
    for k, rho in enumerate(grid):
        u = cost.affordable_backhaul(rho)
        if u is None:
            continue
        resource[k] = u
        p = p_base.replace(sbs_density=float(rho), sbs_backhaul=u)
        try:
            caps = cap_loads(p, strict=False)
            mu[k] = solve(p, model, budget, caps).mu
        except HetCacheError:
            continue
    return _finish(grid, resource, mu)


def caching_station_capacity(p: NetworkParams, model: PopularityModel, sbs_cache: float) -> float:
    """Capacity when SBSs have no backhaul: misses go to MBSs and SBSs serve their hits only."""
    caps = cap_loads(p.replace(sbs_backhaul=0.0), strict=False).replace(sbh=UNBOUNDED)
    hits = hit_rates_for(model, min(sbs_cache, model.file_count), 0.0)
    return capacity(caps, hits, 0.0).mu


def optimize_sbs_density_caching_station(
    p_base: NetworkParams,
    model: PopularityModel,
    cost: CostModel,
    rho_grid=DEFAULT_DENSITY_GRID,
) -> DensityCurve:
    """Capacity-optimal density of backhaul-free SBSs whose caches are bought from the budget."""
    if not cost.budget > 0:
        raise DomainError("cost budget must be positive")
    grid = _check_grid(rho_grid)
    resource = np.full(grid.size, np.nan)
    mu = np.full(grid.size, np.nan)
    for k, rho in enumerate(grid):
        cs = cost.affordable_cache(rho)
        if cs is None:
            continue
        cs = min(cs, float(model.file_count))
        resource[k] = cs
        try:
            mu[k] = caching_station_capacity(p_base.replace(sbs_density=float(rho)), model, cs)
        except HetCacheError:
            continue
    return _finish(grid, resource, mu)


@dataclass(frozen=True)
class Calibration:
    u_sbh: float
    c_min: float
    c_max: float
    residual: float  # root-mean-square threshold error, files/km²


def calibrate_sbs_backhaul(
    p: NetworkParams,
    model: PopularityModel,
    target: tuple[float, float] = (870.0, 930.0),
    bounds: tuple[float, float] = (0.1e9, 1.2e9),
) -> Calibration:
    """SBS backhaul whose thresholds best match ``target`` in the least-squares sense."""

    def thresholds_at(u):
        caps = cap_loads(p.replace(sbs_backhaul=u), strict=False)
        if classify_regime(caps) is not BackhaulRegime.IDEAL_MBH_CONSTRAINED_SBH:
            return None
        return thresholds_from_caps(caps, model, p.mbs_density, p.sbs_density)

    def loss(u):
        th = thresholds_at(u)
        if th is None:
            return math.inf
        return (th[0] - target[0]) ** 2 + (th[1] - target[1]) ** 2

    # coarse scan first; the loss is flat and infinite outside the constrained regime
    scan = np.linspace(bounds[0], bounds[1], 221)
    losses = np.array([loss(u) for u in scan])
    if not np.any(np.isfinite(losses)):
        raise RegimeError("SBS backhaul never binds within the calibration bounds")
    k = int(np.argmin(losses))
    lo, hi = scan[max(k - 1, 0)], scan[min(k + 1, scan.size - 1)]
    res = minimize_scalar(loss, bounds=(lo, hi), method="bounded", options={"xatol": 1e3})
    u = float(res.x) if res.fun <= losses[k] else float(scan[k])
    c_min, c_max = thresholds_at(u)
    return Calibration(u, c_min, c_max, math.sqrt(loss(u) / 2))
