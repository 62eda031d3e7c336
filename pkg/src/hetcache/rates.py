"""Closed-form mean file-transmission rates and the maximal per-part loads.

Densities are per km² throughout. Path loss is evaluated with distances in
metres (``d**-alpha`` with ``d`` in m), which is the scale at which the
reference transmit powers and noise density describe a realistic link budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy.optimize import bisect

from .errors import InfeasiblePartError, InvalidParameterError, LowSNRError, DomainError

EULER_GAMMA = 0.57721566490153286
UNBOUNDED = math.inf
HEX_AREA_FACTOR = 1.5 * math.sqrt(3.0)
M_PER_KM = 1000.0
PARTS = ("MR", "MBH", "SR", "SBH")


@dataclass(frozen=True)
class NetworkParams:
    """Physical constants of the two-tier network, in base SI units (distances in km)."""

    mbs_side_km: float
    sbs_density: float
    mbs_bandwidth: float
    sbs_bandwidth: float
    mbs_power: float
    sbs_power: float
    pathloss_mbs: float
    pathloss_sbs: float
    noise_psd: float  # W/Hz; each tier integrates it over its own band
    interference_ratio_mbs: float
    interference_ratio_sbs: float
    sinr_cap: float
    mbs_backhaul: float
    sbs_backhaul: float
    rate_req_ran: float
    rate_req_bh: float
    gamma_shape: float = 3.575
    # diagnostics only; never used in the maths
    label: str = field(default="", compare=False)

    def __post_init__(self):
        positive = (
            "mbs_side_km", "sbs_density", "mbs_bandwidth", "sbs_bandwidth",
            "mbs_power", "sbs_power", "noise_psd", "sinr_cap", "mbs_backhaul",
        )
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        for name in ("rate_req_ran", "rate_req_bh"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be nonnegative and finite, got {value!r}")
        if not self.sbs_backhaul >= 0:
            raise InvalidParameterError(f"sbs_backhaul must be nonnegative, got {self.sbs_backhaul!r}")
        for name in ("interference_ratio_mbs", "interference_ratio_sbs"):
            if not getattr(self, name) >= 0:
                raise InvalidParameterError(f"{name} must be nonnegative")
        for name in ("pathloss_mbs", "pathloss_sbs"):
            if not getattr(self, name) > 2:
                raise InvalidParameterError(f"{name} must exceed 2, got {getattr(self, name)!r}")
        if not self.gamma_shape > 1:
            raise InvalidParameterError(f"gamma_shape must exceed 1, got {self.gamma_shape!r}")
        if self.cap_distance_m > self.mbs_side_m * (1 + 1e-12):
            raise InvalidParameterError(
                "SINR cap is reached beyond the MBS cell edge "
                f"(D_min={self.cap_distance_m:.6g} m > D_m={self.mbs_side_m:.6g} m)"
            )

    def replace(self, **changes) -> "NetworkParams":
        return replace(self, **changes)

    @property
    def mbs_density(self) -> float:
        """Hexagonal-lattice MBS density per km²."""
        return 1.0 / (HEX_AREA_FACTOR * self.mbs_side_km**2)

    @property
    def mbs_side_m(self) -> float:
        return self.mbs_side_km * M_PER_KM

    @property
    def noise_mbs(self) -> float:
        return self.noise_psd * self.mbs_bandwidth

    @property
    def noise_sbs(self) -> float:
        return self.noise_psd * self.sbs_bandwidth

    @property
    def mbs_snr_coeff(self) -> float:
        """Mean-interference SINR at 1 m from an MBS."""
        return self.mbs_power / ((1 + self.interference_ratio_mbs) * self.noise_mbs)

    @property
    def sbs_snr_coeff(self) -> float:
        return self.sbs_power / ((1 + self.interference_ratio_sbs) * self.noise_sbs)

    @property
    def cap_distance_m(self) -> float:
        """Distance at which the MBS mean-interference SINR reaches the cap."""
        return (self.mbs_snr_coeff / self.sinr_cap) ** (1.0 / self.pathloss_mbs)


@dataclass(frozen=True)
class LoadCaps:
    """Maximal equivalent user density (per km²) each network part can carry.

    ``UNBOUNDED`` (``math.inf``) exempts a part from its constraint. A zero
    cap marks a part that cannot meet its requirement at any load; the parts
    concerned are listed in ``infeasible``.
    """

    mr: float
    mbh: float
    sr: float
    sbh: float
    infeasible: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return {"MR": self.mr, "MBH": self.mbh, "SR": self.sr, "SBH": self.sbh}

    def replace(self, **changes) -> "LoadCaps":
        return replace(self, **changes)

    @property
    def radio_total(self) -> float:
        return self.mr + self.sr


def spectrum_efficiency_mbs(p: NetworkParams) -> float:
    """Lower bound on E[log2(1+SINR)] for a user uniform in a disc of radius D_m."""
    alpha = p.pathloss_mbs
    edge = p.mbs_side_m
    ratio = (p.cap_distance_m / edge) ** 2
    tau = math.log2(p.mbs_snr_coeff * edge**-alpha) + alpha / (2 * math.log(2)) * (1 - ratio)
    if not tau > 1e-12:
        raise LowSNRError("MBS", tau)
    return tau


def spectrum_efficiency_sbs(p: NetworkParams) -> float:
    """Lower bound on E[log2(1+SINR)] for Rayleigh-distributed nearest-SBS distance."""
    alpha = p.pathloss_sbs
    rho_m2 = p.sbs_density / M_PER_KM**2
    tau = (
        math.log2(p.sbs_snr_coeff * (math.pi * rho_m2) ** (alpha / 2))
        + alpha / (2 * math.log(2)) * EULER_GAMMA
    )
    if not tau > 1e-12:
        raise LowSNRError("SBS", tau)
    return tau


def poisson_share(load_ratio: float) -> float:
    """E[1/(N+1)] for N ~ Poisson(load_ratio)."""
    if load_ratio < 0:
        raise DomainError(f"load must be nonnegative, got {load_ratio!r}")
    if load_ratio < 1e-8:
        return 1.0 - load_ratio / 2
    return -math.expm1(-load_ratio) / load_ratio


def gamma_poisson_share(load_ratio: float, kappa: float) -> float:
    """E[1/(N+1)] for N ~ Poisson(x·A), A ~ Gamma(kappa, 1/kappa) (unit-mean cell area).

    Uses Γ(κ-1)/Γ(κ) = 1/(κ-1).
    """
    if load_ratio < 0:
        raise DomainError(f"load must be nonnegative, got {load_ratio!r}")
    if load_ratio < 1e-8:
        return 1.0 - load_ratio / 2
    y = load_ratio / kappa
    return -math.expm1(-(kappa - 1) * math.log1p(y)) / ((kappa - 1) * y)


def mean_rate_mbs_backhaul(p: NetworkParams, load: float) -> float:
    return p.mbs_backhaul * poisson_share(load / p.mbs_density)


def mean_rate_sbs_backhaul(p: NetworkParams, load: float) -> float:
    return p.sbs_backhaul * gamma_poisson_share(load / p.sbs_density, p.gamma_shape)


def mean_rate_mbs_radio(p: NetworkParams, load: float) -> float:
    return spectrum_efficiency_mbs(p) * p.mbs_bandwidth * poisson_share(load / p.mbs_density)


def mean_rate_sbs_radio(p: NetworkParams, load: float) -> float:
    return (
        spectrum_efficiency_sbs(p)
        * p.sbs_bandwidth
        * gamma_poisson_share(load / p.sbs_density, p.gamma_shape)
    )


def max_load(rate_fn, requirement: float, scale: float, part: str = "") -> float:
    """Largest load at which the strictly decreasing ``rate_fn`` still meets ``requirement``.

    The bracket starts at ``[0, scale]`` and doubles until the rate drops
    below the requirement. A zero requirement is met at any load.
    """
    if requirement <= 0:
        return UNBOUNDED
    zero_rate = rate_fn(0.0)
    if zero_rate < requirement:
        raise InfeasiblePartError(part, zero_rate, requirement)
    if zero_rate == requirement:
        return 0.0
    hi = scale
    while rate_fn(hi) >= requirement:
        hi *= 2.0
        if hi > 1e300:
            raise InfeasiblePartError(part, zero_rate, requirement)
    return bisect(lambda lam: rate_fn(lam) - requirement, 0.0, hi, xtol=1e-300, rtol=1e-12, maxiter=2000)


def cap_loads(p: NetworkParams, strict: bool = True) -> LoadCaps:
    """Solve each part's rate constraint for its maximal load.

    With ``strict=False`` an unattainable requirement yields a zero cap
    (recorded in ``LoadCaps.infeasible``) instead of raising. An infinite
    SBS backhaul leaves SBH unbounded.
    """
    tau_m = spectrum_efficiency_mbs(p)
    tau_s = spectrum_efficiency_sbs(p)
    parts = {
        "MR": (lambda x: tau_m * p.mbs_bandwidth * poisson_share(x / p.mbs_density),
               p.rate_req_ran, p.mbs_density),
        "MBH": (lambda x: mean_rate_mbs_backhaul(p, x), p.rate_req_bh, p.mbs_density),
        "SR": (lambda x: tau_s * p.sbs_bandwidth
               * gamma_poisson_share(x / p.sbs_density, p.gamma_shape),
               p.rate_req_ran, p.sbs_density),
        "SBH": (lambda x: mean_rate_sbs_backhaul(p, x), p.rate_req_bh, p.sbs_density),
    }
    caps = {}
    infeasible = []
    if math.isinf(p.sbs_backhaul):
        del parts["SBH"]
        caps["SBH"] = UNBOUNDED
    for name, (fn, req, scale) in parts.items():
        try:
            caps[name] = max_load(fn, req, scale, name)
        except InfeasiblePartError:
            if strict:
                raise
            caps[name] = 0.0
            infeasible.append(name)
    return LoadCaps(caps["MR"], caps["MBH"], caps["SR"], caps["SBH"], tuple(infeasible))
