"""Zipf content popularity and hierarchical cache hit rates.

Cache sizes are treated as continuous: the cumulative popularity ``H(x)``
interpolates linearly between integer file counts, i.e. a fractional cache
slot stores the marginal file with the matching probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameterError

_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class PopularityModel:
    file_count: int
    skewness: float
    probabilities: np.ndarray = field(repr=False)
    # cumulative[k] = sum of the k most popular files; length file_count + 1
    cumulative: np.ndarray = field(repr=False, compare=False)

    @property
    def top_probability(self) -> float:
        return float(self.probabilities[0])


def build_zipf(file_count: int, skewness: float) -> PopularityModel:
    """Zipf popularity ``q_f ∝ f**-skewness`` over ``file_count`` files."""
    if int(file_count) != file_count or file_count < 1:
        raise InvalidParameterError(f"file_count must be a positive integer, got {file_count!r}")
    if not skewness >= 0:
        raise InvalidParameterError(f"skewness must be nonnegative, got {skewness!r}")
    ranks = np.arange(1, int(file_count) + 1, dtype=np.float64)
    weights = ranks ** (-float(skewness))
    probs = weights / math.fsum(weights)
    probs.setflags(write=False)
    cum = np.concatenate(([0.0], np.cumsum(probs)))
    cum[-1] = 1.0
    cum.setflags(write=False)
    return PopularityModel(int(file_count), float(skewness), probs, cum)


def _check_x(model: PopularityModel, x: float) -> float:
    F = model.file_count
    if not (-_EDGE_TOL * F <= x <= F * (1 + _EDGE_TOL)):
        raise DomainError(f"cache size {x!r} outside [0, {F}]")
    return min(max(float(x), 0.0), float(F))


def cumulative_popularity(model: PopularityModel, x: float) -> float:
    """Popularity mass of the ``x`` most popular files, piecewise linear in ``x``."""
    x = _check_x(model, x)
    k = int(math.floor(x))
    if k >= model.file_count:
        return 1.0
    return float(model.cumulative[k] + (x - k) * model.probabilities[k])


def cumulative_popularity_array(model: PopularityModel, x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`cumulative_popularity`; ``x`` is clipped to ``[0, F]``."""
    F = model.file_count
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, float(F))
    k = np.minimum(np.floor(x).astype(np.int64), F - 1)
    return np.where(
        x >= F, 1.0, model.cumulative[k] + (x - k) * model.probabilities[k]
    )


def inverse_cumulative_popularity(model: PopularityModel, mass: float) -> float:
    """Smallest cache size whose cumulative popularity equals ``mass``.

    H is strictly increasing and linear between integers, so the inverse is
    found exactly by locating the segment and interpolating.
    """
    if not (-1e-12 <= mass <= 1 + 1e-12):
        raise DomainError(f"popularity mass {mass!r} outside [0, 1]")
    mass = min(max(float(mass), 0.0), 1.0)
    if mass == 0.0:
        return 0.0
    if mass >= 1.0:
        return float(model.file_count)
    k = int(np.searchsorted(model.cumulative, mass, side="right")) - 1
    k = min(max(k, 0), model.file_count - 1)
    return float(k + (mass - model.cumulative[k]) / model.probabilities[k])


@dataclass(frozen=True)
class CacheAllocation:
    """Network cache budget (files/km²), per-BS cache sizes and steering ratio."""

    budget: float
    sbs_cache: float
    mbs_cache: float
    steering: float

    @classmethod
    def from_split(
        cls, budget: float, sbs_cache: float, steering: float, rho_m: float, rho_s: float
    ) -> "CacheAllocation":
        """Spend ``budget`` with ``sbs_cache`` files per SBS and the rest at MBSs."""
        mbs_cache = (budget - rho_s * sbs_cache) / rho_m
        if mbs_cache < 0:
            if mbs_cache > -1e-9 * max(budget / rho_m, 1.0):
                mbs_cache = 0.0
            else:
                raise DomainError(
                    f"SBS cache {sbs_cache} needs {rho_s * sbs_cache} files/km² > budget {budget}"
                )
        return cls(budget, sbs_cache, mbs_cache, steering)

    def validate(self, rho_m: float, rho_s: float, file_count: int) -> None:
        if self.sbs_cache < 0 or self.mbs_cache < 0:
            raise DomainError("cache sizes must be nonnegative")
        if self.sbs_cache + self.mbs_cache > file_count * (1 + _EDGE_TOL):
            raise DomainError(
                f"combined cache {self.sbs_cache + self.mbs_cache} exceeds catalog {file_count}"
            )
        if not 0.0 <= self.steering <= 1.0:
            raise DomainError(f"steering ratio {self.steering} outside [0, 1]")
        spent = rho_m * self.mbs_cache + rho_s * self.sbs_cache
        if abs(spent - self.budget) > 1e-9 * max(abs(self.budget), 1.0):
            raise DomainError(f"allocation spends {spent} files/km² but budget is {self.budget}")

    def sbs_budget_share(self, rho_s: float) -> float:
        """Fraction of the budget placed at SBSs (1 when the budget is zero)."""
        if self.budget <= 0:
            return 1.0
        return rho_s * self.sbs_cache / self.budget


@dataclass(frozen=True)
class HitRates:
    sbs_hit: float
    mbs_hit: float

    @property
    def total_hit(self) -> float:
        return self.sbs_hit + self.mbs_hit

    @property
    def miss(self) -> float:
        return 1.0 - self.total_hit


NO_HITS = HitRates(0.0, 0.0)


def hit_rates(model: PopularityModel, alloc: CacheAllocation) -> HitRates:
    """SBSs hold the most popular files, MBSs the next ``mbs_cache`` files."""
    return hit_rates_for(model, alloc.sbs_cache, alloc.mbs_cache)


def hit_rates_for(model: PopularityModel, sbs_cache: float, mbs_cache: float) -> HitRates:
    if sbs_cache < 0 or mbs_cache < 0:
        raise DomainError("cache sizes must be nonnegative")
    if sbs_cache + mbs_cache > model.file_count * (1 + _EDGE_TOL):
        raise DomainError(
            f"combined cache {sbs_cache + mbs_cache} exceeds catalog {model.file_count}"
        )
    sbs = cumulative_popularity(model, sbs_cache)
    total = cumulative_popularity(model, min(sbs_cache + mbs_cache, model.file_count))
    return HitRates(sbs, max(total - sbs, 0.0))
