"""Equivalent per-part loads and the four-way bottleneck network capacity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HetCacheError
from .popularity import HitRates
from .rates import PARTS, UNBOUNDED, LoadCaps


@dataclass(frozen=True)
class TierLoadProfile:
    lambda_mr: float
    lambda_mbh: float
    lambda_sr: float
    lambda_sbh: float

    @property
    def total(self) -> float:
        return self.lambda_mr + self.lambda_sr


@dataclass(frozen=True)
class CapacityBreakdown:
    mu_mr: float
    mu_mbh: float
    mu_sr: float
    mu_sbh: float
    mu: float
    bottleneck: str

    def as_dict(self) -> dict[str, float]:
        return {"MR": self.mu_mr, "MBH": self.mu_mbh, "SR": self.mu_sr, "SBH": self.mu_sbh}


def _check(hits: HitRates, phi: float) -> None:
    if not 0.0 <= phi <= 1.0:
        raise DomainError(f"steering ratio {phi!r} outside [0, 1]")
    if hits.sbs_hit < 0 or hits.mbs_hit < 0 or hits.total_hit > 1 + 1e-12:
        raise DomainError(f"invalid hit rates {hits!r}")


def load_coefficients(hits: HitRates, phi: float) -> tuple[float, float, float, float]:
    """Share of the total user density loading MR, MBH, SR and SBH."""
    _check(hits, phi)
    miss = max(1.0 - hits.total_hit, 0.0)
    return (
        hits.mbs_hit + miss * (1 - phi),
        miss * (1 - phi),
        hits.sbs_hit + miss * phi,
        miss * phi,
    )


def load_profile(hits: HitRates, phi: float, lam: float) -> TierLoadProfile:
    if lam < 0:
        raise DomainError(f"user density must be nonnegative, got {lam!r}")
    c_mr, c_mbh, c_sr, c_sbh = load_coefficients(hits, phi)
    return TierLoadProfile(c_mr * lam, c_mbh * lam, c_sr * lam, c_sbh * lam)


def _part_capacity(cap: float, coeff: float) -> float:
    if coeff <= 0.0:
        return UNBOUNDED
    return cap / coeff


def capacity(caps: LoadCaps, hits: HitRates, phi: float) -> CapacityBreakdown:
    """Largest total user density all four parts sustain; ties go to MR, MBH, SR, SBH."""
    coeffs = load_coefficients(hits, phi)
    caps_t = (caps.mr, caps.mbh, caps.sr, caps.sbh)
    mus = [_part_capacity(c, k) for c, k in zip(caps_t, coeffs)]
    mu = min(mus)
    if math.isinf(mu):
        raise HetCacheError("every network part is unbounded; capacity is undefined")
    return CapacityBreakdown(*mus, mu=mu, bottleneck=PARTS[mus.index(mu)])


def capacity_arrays(
    caps: LoadCaps, sbs_hit: np.ndarray, mbs_hit: np.ndarray, phi: np.ndarray
) -> tuple[np.ndarray, ...]:
    """Broadcasting form of :func:`capacity`; returns (mu_mr, mu_mbh, mu_sr, mu_sbh, mu)."""
    sbs_hit, mbs_hit, phi = np.broadcast_arrays(
        np.asarray(sbs_hit, float), np.asarray(mbs_hit, float), np.asarray(phi, float)
    )
    miss = np.maximum(1.0 - sbs_hit - mbs_hit, 0.0)
    coeffs = (
        mbs_hit + miss * (1 - phi),
        miss * (1 - phi),
        sbs_hit + miss * phi,
        miss * phi,
    )
    out = []
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for cap, coeff in zip((caps.mr, caps.mbh, caps.sr, caps.sbh), coeffs):
            out.append(np.where(coeff > 0, cap / np.where(coeff > 0, coeff, 1.0), np.inf))
    out.append(np.minimum(np.minimum(out[0], out[1]), np.minimum(out[2], out[3])))
    return tuple(out)
