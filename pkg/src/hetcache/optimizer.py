"""Capacity-optimal cache split and traffic steering.

Two routes solve the same problem: an exhaustive lattice search over
(SBS cache size, steering ratio) and the closed-form threshold solution for
networks whose MBS backhaul never binds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .capacity import CapacityBreakdown, capacity, capacity_arrays
from .errors import CatalogTooSmallError, DomainError, HetCacheError, RegimeError
from .popularity import (
    HitRates,
    PopularityModel,
    cumulative_popularity,
    cumulative_popularity_array,
    hit_rates_for,
    inverse_cumulative_popularity,
)
from .rates import LoadCaps, NetworkParams, cap_loads

DEFAULT_GRID = (200, 200)
_TIE_RTOL = 1e-12


class Regime(str, enum.Enum):
    UNCONSTRAINED_BACKHAUL = "UNCONSTRAINED_BACKHAUL"
    BUDGET_BELOW_CMIN = "BUDGET_BELOW_CMIN"
    BUDGET_MID = "BUDGET_MID"
    BUDGET_ABOVE_CMAX = "BUDGET_ABOVE_CMAX"
    GRID_ONLY = "GRID_ONLY"


class BackhaulRegime(str, enum.Enum):
    IDEAL_MBH_UNCONSTRAINED_SBH = "IDEAL_MBH_UNCONSTRAINED_SBH"
    IDEAL_MBH_CONSTRAINED_SBH = "IDEAL_MBH_CONSTRAINED_SBH"
    NON_IDEAL_MBH = "NON_IDEAL_MBH"


@dataclass(frozen=True)
class OptimalPlan:
    regime: Regime
    budget: float
    sbs_cache: float
    mbs_cache: float
    steering: float
    mu: float
    hits: HitRates
    breakdown: CapacityBreakdown
    thresholds: tuple[float, float] | None
    sbs_share: float  # fraction of the budget spent at SBSs

    @property
    def rounded_caches(self) -> tuple[int, int]:
        """Integer cache sizes nearest to the continuous optimum."""
        return int(round(self.sbs_cache)), int(round(self.mbs_cache))


def classify_regime(caps: LoadCaps) -> BackhaulRegime:
    if not caps.mr <= caps.mbh:
        return BackhaulRegime.NON_IDEAL_MBH
    if caps.sr <= caps.sbh:
        return BackhaulRegime.IDEAL_MBH_UNCONSTRAINED_SBH
    return BackhaulRegime.IDEAL_MBH_CONSTRAINED_SBH


def no_cache_capacity(caps: LoadCaps) -> tuple[float, float]:
    """Best steering ratio and capacity without any cache: ``(phi, mu)``."""
    mbs_side = min(caps.mr, caps.mbh)
    sbs_side = min(caps.sr, caps.sbh)
    total = mbs_side + sbs_side
    if total <= 0:
        raise RegimeError("no network part can carry any load")
    return sbs_side / total, total


def best_steering(caps: LoadCaps, hits: HitRates) -> tuple[float, float]:
    """Steering ratio maximising capacity for fixed hit rates: ``(phi, mu)``.

    The MBS-side part capacities rise with the steering ratio and the
    SBS-side ones fall, so the optimum is either an endpoint or their crossing.
    """
    def sides(phi):
        b = capacity(caps, hits, phi)
        return min(b.mu_mr, b.mu_mbh), min(b.mu_sr, b.mu_sbh)

    inc1, dec1 = sides(1.0)
    if inc1 <= dec1:
        return 1.0, inc1
    inc0, dec0 = sides(0.0)
    if dec0 <= inc0:
        return 0.0, dec0
    phi = brentq(lambda f: sides(f)[0] - sides(f)[1], 0.0, 1.0,
                 xtol=1e-15, rtol=1e-15, maxiter=500)
    return phi, capacity(caps, hits, phi).mu


def _mbs_cache_for(model: PopularityModel, budget, sbs_cache, rho_m, rho_s):
    """MBS cache that spends the rest of the budget, clipped to the unused catalog."""
    spend = (budget - rho_s * sbs_cache) / rho_m
    return np.clip(np.minimum(spend, model.file_count - sbs_cache), 0.0, None)


def _plan(caps, model, rho_m, rho_s, budget, sbs_cache, mbs_cache, phi, regime, thresholds):
    hits = hit_rates_for(model, sbs_cache, mbs_cache)
    breakdown = capacity(caps, hits, phi)
    if budget <= 0 or (mbs_cache == 0 and sbs_cache == budget / rho_s):
        share = 1.0  # whole budget at SBSs; avoids rounding in rho_s * (budget / rho_s) / budget
    else:
        share = rho_s * sbs_cache / budget
    return OptimalPlan(
        regime=regime,
        budget=budget,
        sbs_cache=float(sbs_cache),
        mbs_cache=float(mbs_cache),
        steering=float(phi),
        mu=breakdown.mu,
        hits=hits,
        breakdown=breakdown,
        thresholds=thresholds,
        sbs_share=share,
    )


@dataclass(frozen=True)
class CapacitySurface:
    """Capacity on a (SBS cache, steering) lattice; 2-D arrays are indexed [cs, phi]."""

    budget: float
    sbs_cache: np.ndarray
    mbs_cache: np.ndarray
    steering: np.ndarray
    sbs_hit: np.ndarray
    total_hit: np.ndarray
    mu: np.ndarray
    parts: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def capacity_surface(
    p: NetworkParams,
    model: PopularityModel,
    budget: float,
    grid: tuple[int, int] = DEFAULT_GRID,
    caps: LoadCaps | None = None,
) -> CapacitySurface:
    n_cs, n_phi = grid
    if n_cs < 2 or n_phi < 2:
        raise DomainError(f"grid sizes must be >= 2, got {grid}")
    if budget < 0:
        raise DomainError(f"cache budget must be nonnegative, got {budget}")
    caps = cap_loads(p) if caps is None else caps
    rho_m, rho_s = p.mbs_density, p.sbs_density
    cs = np.linspace(0.0, min(budget / rho_s, model.file_count), n_cs)
    cm = _mbs_cache_for(model, budget, cs, rho_m, rho_s)
    phi = np.linspace(0.0, 1.0, n_phi)
    sbs_hit = cumulative_popularity_array(model, cs)
    total_hit = cumulative_popularity_array(model, cs + cm)
    mbs_hit = np.maximum(total_hit - sbs_hit, 0.0)
    mu_mr, mu_mbh, mu_sr, mu_sbh, mu = capacity_arrays(
        caps, sbs_hit[:, None], mbs_hit[:, None], phi[None, :]
    )
    return CapacitySurface(budget, cs, cm, phi, sbs_hit, total_hit, mu, (mu_mr, mu_mbh, mu_sr, mu_sbh))


def grid_search(
    p: NetworkParams,
    model: PopularityModel,
    budget: float,
    grid: tuple[int, int] = DEFAULT_GRID,
    caps: LoadCaps | None = None,
) -> OptimalPlan:
    """Exhaustive lattice maximisation of capacity.

    Ties (within a relative 1e-12) go to the larger total hit rate, then the
    smaller SBS cache, then the smaller steering ratio.
    """
    caps = cap_loads(p) if caps is None else caps
    surf = capacity_surface(p, model, budget, grid, caps)
    best = surf.mu.max()
    if not math.isfinite(best):
        # every part unbounded somewhere; take the full-hit lattice points as ties
        tied = np.isinf(surf.mu)
    else:
        tied = surf.mu >= best * (1 - _TIE_RTOL)
    i_idx, j_idx = np.nonzero(tied)
    order = np.lexsort((j_idx, i_idx, -surf.total_hit[i_idx]))
    i, j = int(i_idx[order[0]]), int(j_idx[order[0]])
    return _plan(
        caps, model, p.mbs_density, p.sbs_density, budget,
        surf.sbs_cache[i], float(surf.mbs_cache[i]), surf.steering[j],
        Regime.GRID_ONLY, None,
    )


def thresholds_from_caps(caps: LoadCaps, model: PopularityModel, rho_m: float, rho_s: float):
    radio = caps.mr + caps.sr
    if not radio > 0:
        raise HetCacheError("neither tier's radio access meets its requirement at any load")
    deficiency = (caps.sr - caps.sbh) / radio
    x_min = inverse_cumulative_popularity(model, deficiency)
    mbs_mass = caps.mr / radio
    head = cumulative_popularity(model, x_min)
    if 1.0 - head < mbs_mass - 1e-12:
        raise CatalogTooSmallError(
            f"popularity tail {1 - head:.6g} beyond the SBS cache cannot supply MBS mass {mbs_mass:.6g}"
        )
    x_end = inverse_cumulative_popularity(model, min(head + mbs_mass, 1.0))
    c_min = rho_s * x_min
    return float(c_min), float(c_min + rho_m * (x_end - x_min))


def thresholds(
    p: NetworkParams, model: PopularityModel, caps: LoadCaps | None = None
) -> tuple[float, float]:
    """Budget thresholds ``(C_min, C_max)`` in files/km² for an SBS-backhaul-limited network."""
    caps = cap_loads(p) if caps is None else caps
    if not caps.mr <= caps.mbh:
        raise RegimeError(
            f"MBS backhaul is not ideal: MR cap {caps.mr:.6g} > MBH cap {caps.mbh:.6g}"
        )
    if not caps.sr >= caps.sbh:
        raise RegimeError(
            f"SBS backhaul is not a constraint: SR cap {caps.sr:.6g} < SBH cap {caps.sbh:.6g}"
        )
    return thresholds_from_caps(caps, model, p.mbs_density, p.sbs_density)


def solve_analytic(
    p: NetworkParams,
    model: PopularityModel,
    budget: float,
    caps: LoadCaps | None = None,
) -> OptimalPlan:
    """Threshold-based optimum for networks with ideal MBS backhaul.

    Among capacity-optimal splits the one with the highest total hit rate is
    returned. When SBS backhaul does not bind either, the SBS tier is treated
    as if its backhaul cap equalled its radio cap: no SBS cache is needed
    (C_min = 0) and the budget goes to MBSs until MBS radio saturates.
    """
    if budget < 0:
        raise DomainError(f"cache budget must be nonnegative, got {budget}")
    caps = cap_loads(p) if caps is None else caps
    rho_m, rho_s = p.mbs_density, p.sbs_density
    backhaul = classify_regime(caps)
    if backhaul is BackhaulRegime.NON_IDEAL_MBH:
        raise RegimeError(
            f"MBS backhaul is not ideal (MR cap {caps.mr:.6g} > MBH cap {caps.mbh:.6g}); "
            "use grid_search"
        )
    if backhaul is BackhaulRegime.IDEAL_MBH_UNCONSTRAINED_SBH:
        effective = caps.replace(sbh=caps.sr)
        reported = None
    else:
        effective = caps
    c_min, c_max = thresholds_from_caps(effective, model, rho_m, rho_s)
    if backhaul is BackhaulRegime.IDEAL_MBH_CONSTRAINED_SBH:
        reported = (c_min, c_max)

    radio = caps.mr + caps.sr

    def label(regime):
        return Regime.UNCONSTRAINED_BACKHAUL if reported is None else regime

    if budget < c_min:
        cs = budget / rho_s
        phi = effective.sbh / (caps.mr + effective.sbh)
        return _plan(caps, model, rho_m, rho_s, budget, cs, 0.0, phi,
                     label(Regime.BUDGET_BELOW_CMIN), reported)

    if budget < c_max:
        cs = c_min / rho_s
        cm = (budget - c_min) / rho_m
        miss = 1.0 - cumulative_popularity(model, min(cs + cm, model.file_count))
        phi = effective.sbh / (miss * radio)
        if phi > 1 + 1e-9:
            raise RegimeError(f"steering ratio {phi:.6g} > 1 below C_max; inconsistent caps")
        return _plan(caps, model, rho_m, rho_s, budget, cs, cm, min(phi, 1.0),
                     label(Regime.BUDGET_MID), reported)

    mbs_mass = caps.mr / radio
    hi = min(budget / rho_s, float(model.file_count))
    lo = min(c_min / rho_s, hi)

    def excess(cs):
        cm = float(_mbs_cache_for(model, budget, cs, rho_m, rho_s))
        return (cumulative_popularity(model, min(cs + cm, model.file_count))
                - cumulative_popularity(model, cs) - mbs_mass)

    if excess(lo) <= 0:
        cs = lo
    else:
        cs = brentq(excess, lo, hi, xtol=1e-12, rtol=1e-14, maxiter=500)
    cm = float(_mbs_cache_for(model, budget, cs, rho_m, rho_s))
    return _plan(caps, model, rho_m, rho_s, budget, cs, cm, 1.0,
                 label(Regime.BUDGET_ABOVE_CMAX), reported)


def solve(
    p: NetworkParams,
    model: PopularityModel,
    budget: float,
    caps: LoadCaps | None = None,
    grid: tuple[int, int] = DEFAULT_GRID,
) -> OptimalPlan:
    """Analytic solution where it applies, lattice search otherwise."""
    caps = cap_loads(p) if caps is None else caps
    try:
        return solve_analytic(p, model, budget, caps)
    except RegimeError:
        return grid_search(p, model, budget, grid, caps)
