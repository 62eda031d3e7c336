"""Shared generators and the analytic-vs-lattice comparison used by several test modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hetcache.errors import CatalogTooSmallError, LowSNRError, InvalidParameterError
from hetcache.optimizer import best_steering, capacity_surface, solve_analytic, thresholds
from hetcache.popularity import build_zipf, hit_rates_for
from hetcache.presets import table3_params
from hetcache.rates import cap_loads, gamma_poisson_share

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@dataclass(frozen=True)
class Case:
    params: object
    model: object
    budget: float
    regime_hint: str


def random_constrained_case(rng: np.random.Generator, regime: str | None = None) -> Case:
    """Random network with ideal MBS backhaul and a binding SBS backhaul, plus a budget.

    The SBS backhaul is set by inverting its mean-rate formula so that the SBH
    load cap is a random fraction of the SR cap.
    """
    while True:
        try:
            p = table3_params(
                mbs_side_km=rng.uniform(0.35, 0.7),
                sbs_density=rng.uniform(20.0, 200.0),
                rate_req_ran=rng.uniform(2e6, 10e6),
                rate_req_bh=rng.uniform(20e6, 100e6),
                sbs_backhaul=1e12,
            )
            model = build_zipf(int(rng.integers(200, 3001)), rng.uniform(0.3, 1.3))
            caps = cap_loads(p)
            target = rng.uniform(0.3, 0.97) * caps.sr
            u = p.rate_req_bh / gamma_poisson_share(target / p.sbs_density, p.gamma_shape)
            p = p.replace(sbs_backhaul=u)
            caps = cap_loads(p)
            if not (caps.mr <= caps.mbh and caps.sbh < caps.sr):
                continue
            c_min, c_max = thresholds(p, model, caps)
        except (CatalogTooSmallError, LowSNRError, InvalidParameterError):
            continue
        kind = regime or ("below", "mid", "above")[int(rng.integers(3))]
        ceiling = p.sbs_density * model.file_count
        if kind == "below":
            budget = rng.uniform(0.0, c_min)
        elif kind == "mid":
            budget = rng.uniform(c_min, c_max)
        else:
            budget = rng.uniform(c_max, min(1.5 * c_max, ceiling))
        return Case(p, model, float(budget), kind)


@dataclass(frozen=True)
class GridComparison:
    mu_star: float
    grid_max: float
    cell_increment: float
    ridge_increment: float
    hit_increment: float
    plan_hit: float
    best_near_hit: float

    @property
    def upper_ok(self) -> bool:
        return self.grid_max <= self.mu_star * (1 + 1e-9)

    @property
    def within_cell(self) -> bool:
        return self.mu_star - self.grid_max <= self.cell_increment * (1 + 1e-9) + 1e-9

    @property
    def hit_ok(self) -> bool:
        return self.plan_hit >= self.best_near_hit - self.hit_increment - 1e-12

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.within_cell and self.hit_ok


def _bracket(axis: np.ndarray, x: float) -> int:
    return int(np.clip(np.searchsorted(axis, x, side="right") - 1, 0, axis.size - 2))


def compare_with_grid(p, model, budget: float, grid=(400, 400), caps=None) -> GridComparison:
    """Analytic optimum against the lattice maximum, with lattice-resolution tolerances.

    * cell increment: largest capacity change between the analytic optimum and
      the four lattice corners of the cell that contains it;
    * ridge increment: capacity lost by moving the SBS cache one lattice step
      away from the optimum while re-optimising the steering ratio;
    * hit increment: total-hit change between adjacent SBS-cache rows around
      the optimum.

    Near-optimal lattice points are those within the ridge increment of the
    analytic capacity.
    """
    caps = cap_loads(p) if caps is None else caps
    plan = solve_analytic(p, model, budget, caps)
    surf = capacity_surface(p, model, budget, grid, caps)
    cs, phi = surf.sbs_cache, surf.steering
    i, j = _bracket(cs, plan.sbs_cache), _bracket(phi, plan.steering)
    corners = surf.mu[i:i + 2, j:j + 2]
    cell = float(np.max(np.abs(corners - plan.mu)))

    step = cs[1] - cs[0]
    ridge = []
    for x in (plan.sbs_cache - step, plan.sbs_cache + step):
        if 0 <= x <= cs[-1]:
            cm = float(np.clip(min((budget - p.sbs_density * x) / p.mbs_density,
                                   model.file_count - x), 0.0, None))
            ridge.append(best_steering(caps, hit_rates_for(model, x, cm))[1])
    ridge_inc = max(plan.mu - min(ridge), 0.0) if ridge else 0.0

    rows = [r for r in (i - 1, i, i + 1) if 0 <= r < cs.size - 1]
    hit_inc = max(abs(surf.total_hit[r + 1] - surf.total_hit[r]) for r in rows)
    near = surf.mu >= plan.mu - ridge_inc
    near_rows = np.nonzero(near.any(axis=1))[0]
    best_near = float(surf.total_hit[near_rows].max()) if near_rows.size else -np.inf
    return GridComparison(plan.mu, float(surf.mu.max()), cell, ridge_inc, hit_inc,
                          plan.hits.total_hit, best_near)
