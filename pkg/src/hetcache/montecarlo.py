"""Geometry-level Monte Carlo of the two-tier network.

Each trial draws a fresh network on a torus: MBSs on a hexagonal lattice,
SBSs and users as Poisson point processes. A probe user placed uniformly at
random plays the typical user; its four conditional mean rates are averaged
over trials. Every trial has its own Philox stream keyed by
``(seed, trial_index, stream)`` so trials can be evaluated in any order.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Voronoi, cKDTree

from .capacity import TierLoadProfile, load_coefficients, load_profile
from .errors import ConfigError, InfeasiblePartError
from .popularity import CacheAllocation, PopularityModel, hit_rates
from .rates import M_PER_KM, PARTS, NetworkParams

MIN_MBS_CELLS = 9
MIN_EXPECTED_SBS = 50.0

# user types, in the order their densities appear in TierLoadProfile
MHU, MMU, SHU, SMU = range(4)
TYPE_NAMES = ("MHU", "MMU", "SHU", "SMU")

_STREAM_SBS, _STREAM_USERS, _STREAM_TYPES, _STREAM_PROBE, _STREAM_FADING = range(5)


class InterferenceMode(str, enum.Enum):
    MEAN_FIELD = "MEAN_FIELD"
    SAMPLED = "SAMPLED"


@dataclass(frozen=True)
class SimConfig:
    window_km: float = 3.0
    trials: int = 10_000
    seed: int = 0
    mbs_fraction: float = 0.15
    interference_mode: InterferenceMode = InterferenceMode.MEAN_FIELD

    def __post_init__(self):
        if not self.window_km > 0:
            raise ConfigError(f"window_km must be positive, got {self.window_km!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0.0 <= self.mbs_fraction <= 1.0:
            raise ConfigError(f"mbs_fraction must lie in [0, 1], got {self.mbs_fraction!r}")
        object.__setattr__(self, "interference_mode", InterferenceMode(self.interference_mode))


def trial_rng(seed: int, trial_index: int, stream: int) -> np.random.Generator:
    """Counter-based generator for one (seed, trial, stream) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial_index, stream])))


def hex_lattice(side_km: float, window_km: float) -> tuple[np.ndarray, np.ndarray]:
    """MBS sites of a hexagonal-cell lattice on a torus close to ``window_km`` square.

    The torus sides are rounded to whole lattice periods (``√3·side`` across,
    ``3·side`` for two rows) so the lattice wraps without seams.
    """
    dx = math.sqrt(3.0) * side_km
    dy = 1.5 * side_km
    nx = max(1, round(window_km / dx))
    ny = 2 * max(1, round(window_km / (2 * dy)))
    if nx * ny < MIN_MBS_CELLS:
        raise ConfigError(
            f"window of {window_km} km holds only {nx * ny} MBS cells of side {side_km} km; "
            f"need at least {MIN_MBS_CELLS}"
        )
    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    sites = np.column_stack((((i + 0.5 * (j % 2)) * dx).ravel(), (j * dy).ravel()))
    return sites, np.array([nx * dx, ny * dy])


def torus_distance(a: np.ndarray, b: np.ndarray, box: np.ndarray) -> np.ndarray:
    d = np.abs(np.asarray(a) - np.asarray(b))
    d = np.minimum(d, box - d)
    return np.hypot(d[..., 0], d[..., 1])


@dataclass(frozen=True)
class Realization:
    """One network snapshot; coordinates in km on the torus ``[0, box)``."""

    box: np.ndarray
    mbs_sites: np.ndarray
    sbs_sites: np.ndarray
    users: np.ndarray
    user_types: np.ndarray | None
    user_mbs: np.ndarray
    user_sbs: np.ndarray
    probe: np.ndarray
    probe_mbs: int
    probe_sbs: int
    fading_mbs: float  # probe's serving-link gains
    fading_sbs: float


def sample_realization(
    p: NetworkParams,
    lam: float,
    cfg: SimConfig,
    trial_index: int,
    type_shares: tuple[float, float, float, float] | None = None,
) -> Realization:
    """Draw the network seen by trial ``trial_index``.

    ``type_shares`` gives the probability of each user type (MHU, MMU, SHU,
    SMU); without it users are left untyped.
    """
    mbs, box = hex_lattice(p.mbs_side_km, cfg.window_km)
    area = float(box[0] * box[1])
    if p.sbs_density * area < MIN_EXPECTED_SBS:
        raise ConfigError(
            f"window area {area:.3g} km² holds {p.sbs_density * area:.3g} SBSs on average; "
            f"need at least {MIN_EXPECTED_SBS}"
        )
    seed = cfg.seed

    rng = trial_rng(seed, trial_index, _STREAM_SBS)
    sbs = np.mod(rng.random((rng.poisson(p.sbs_density * area), 2)) * box, box)
    if len(sbs) == 0:
        raise RuntimeError(f"trial {trial_index} drew no SBS")

    rng = trial_rng(seed, trial_index, _STREAM_USERS)
    n_users = rng.poisson(lam * area) if lam > 0 else 0
    users = np.mod(rng.random((n_users, 2)) * box, box)

    types = None
    if type_shares is not None:
        shares = np.clip(np.asarray(type_shares, dtype=float), 0.0, None)
        shares = shares / shares.sum() if shares.sum() > 0 else np.array([0, 0, 0, 1.0])
        types = trial_rng(seed, trial_index, _STREAM_TYPES).choice(4, size=n_users, p=shares)

    rng = trial_rng(seed, trial_index, _STREAM_PROBE)
    probe = np.mod(rng.random(2) * box, box)

    mbs_tree = cKDTree(mbs, boxsize=box)
    sbs_tree = cKDTree(sbs, boxsize=box)
    if n_users:
        user_mbs = mbs_tree.query(users)[1]
        user_sbs = sbs_tree.query(users)[1]
    else:
        user_mbs = user_sbs = np.zeros(0, dtype=np.intp)
    probe_mbs = int(mbs_tree.query(probe)[1])
    probe_sbs = int(sbs_tree.query(probe)[1])

    fading = trial_rng(seed, trial_index, _STREAM_FADING).exponential(size=2)
    return Realization(
        box, mbs, sbs, users, types, user_mbs, user_sbs, probe,
        probe_mbs, probe_sbs, float(fading[0]), float(fading[1]),
    )


@dataclass(frozen=True)
class EmpiricalRates:
    """Per-part mean rates (bit/s) and their standard errors over trials."""

    mean: dict[str, float]
    stderr: dict[str, float]
    trials: int


def _sinr(p: NetworkParams, real: Realization, tier: str, mode: InterferenceMode, rng) -> float:
    if tier == "m":
        sites, idx, power, alpha = real.mbs_sites, real.probe_mbs, p.mbs_power, p.pathloss_mbs
        noise, theta, gain = p.noise_mbs, p.interference_ratio_mbs, real.fading_mbs
    else:
        sites, idx, power, alpha = real.sbs_sites, real.probe_sbs, p.sbs_power, p.pathloss_sbs
        noise, theta, gain = p.noise_sbs, p.interference_ratio_sbs, real.fading_sbs
    dist_m = torus_distance(real.probe, sites, real.box) * M_PER_KM
    signal = power * gain * dist_m[idx] ** -alpha
    if mode is InterferenceMode.MEAN_FIELD:
        interference = theta * noise
    else:
        others = np.delete(dist_m, idx)
        interference = float(np.sum(power * rng.exponential(size=others.size) * others**-alpha))
    return min(p.sinr_cap, signal / (noise + interference))


def _trial_rates(p: NetworkParams, profile: TierLoadProfile, cfg: SimConfig, trial: int) -> np.ndarray:
    lam = profile.total
    shares = (
        profile.lambda_mr - profile.lambda_mbh,
        profile.lambda_mbh,
        profile.lambda_sr - profile.lambda_sbh,
        profile.lambda_sbh,
    )
    real = sample_realization(p, lam, cfg, trial, shares if lam > 0 else None)
    if real.user_types is not None and len(real.users):
        t = real.user_types
        in_mbs = real.user_mbs == real.probe_mbs
        in_sbs = real.user_sbs == real.probe_sbs
        n_mr = np.count_nonzero(in_mbs & (t <= MMU))
        n_mbh = np.count_nonzero(in_mbs & (t == MMU))
        n_sr = np.count_nonzero(in_sbs & (t >= SHU))
        n_sbh = np.count_nonzero(in_sbs & (t == SMU))
    else:
        n_mr = n_mbh = n_sr = n_sbh = 0
    rng = trial_rng(cfg.seed, trial, _STREAM_FADING + 1)
    se_m = math.log2(1 + _sinr(p, real, "m", cfg.interference_mode, rng))
    se_s = math.log2(1 + _sinr(p, real, "s", cfg.interference_mode, rng))
    return np.array([
        p.mbs_bandwidth * se_m / (n_mr + 1),
        p.mbs_backhaul / (n_mbh + 1),
        p.sbs_bandwidth * se_s / (n_sr + 1),
        p.sbs_backhaul / (n_sbh + 1),
    ])


def empirical_rates(p: NetworkParams, profile: TierLoadProfile, cfg: SimConfig) -> EmpiricalRates:
    """Mean MR/MBH/SR/SBH rates seen by a typical user, with standard errors."""
    samples = np.empty((cfg.trials, 4))
    for trial in range(cfg.trials):
        samples[trial] = _trial_rates(p, profile, cfg, trial)
    mean = samples.sum(axis=0) / cfg.trials
    if cfg.trials > 1:
        stderr = samples.std(axis=0, ddof=1) / math.sqrt(cfg.trials)
    else:
        stderr = np.full(4, math.inf)
    return EmpiricalRates(
        dict(zip(PARTS, map(float, mean))), dict(zip(PARTS, map(float, stderr))), cfg.trials
    )


def split_profile(lam: float, mbs_fraction: float) -> TierLoadProfile:
    """All users requesting uncached content, ``mbs_fraction`` of them served by MBSs."""
    return TierLoadProfile(
        mbs_fraction * lam, mbs_fraction * lam, (1 - mbs_fraction) * lam, (1 - mbs_fraction) * lam
    )


@dataclass(frozen=True)
class EmpiricalCapacity:
    value: float
    unbounded: bool
    evaluations: int


def empirical_capacity(
    p: NetworkParams,
    model: PopularityModel,
    alloc: CacheAllocation,
    cfg: SimConfig,
    rel_tol: float = 0.01,
    max_doublings: int = 30,
) -> EmpiricalCapacity:
    """Largest user density at which all loaded parts meet their requirements empirically."""
    hits = hit_rates(model, alloc)
    coeffs = load_coefficients(hits, alloc.steering)
    reqs = (p.rate_req_ran, p.rate_req_bh, p.rate_req_ran, p.rate_req_bh)
    active = [k for k in range(4) if coeffs[k] > 0 and reqs[k] > 0]
    evaluations = 0

    def shortfall(lam):
        nonlocal evaluations
        evaluations += 1
        rates = empirical_rates(p, load_profile(hits, alloc.steering, lam), cfg)
        return [PARTS[k] for k in active if rates.mean[PARTS[k]] < reqs[k]]

    if not active:
        return EmpiricalCapacity(math.inf, True, 0)
    failing = shortfall(0.0)
    if failing:
        part = failing[0]
        zero = {"MR": p.mbs_bandwidth, "SR": p.sbs_bandwidth}
        raise InfeasiblePartError(part, zero.get(part, math.nan), reqs[PARTS.index(part)])

    lo, hi = 0.0, p.mbs_density + p.sbs_density
    for _ in range(max_doublings):
        if shortfall(hi):
            break
        lo, hi = hi, 2 * hi
    else:
        return EmpiricalCapacity(hi, True, evaluations)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if shortfall(mid):
            hi = mid
        else:
            lo = mid
    return EmpiricalCapacity(lo, False, evaluations)


def voronoi_cell_areas(points: np.ndarray, box: np.ndarray) -> np.ndarray:
    """Areas of the Voronoi cells of ``points`` on the torus ``[0, box)``."""
    n = len(points)
    shifts = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float) * box
    tiled = (points[None, :, :] + shifts[:, None, :]).reshape(-1, 2)
    vor = Voronoi(tiled)
    centre = 4 * n  # shift (0, 0) block
    areas = np.empty(n)
    for k in range(n):
        region = vor.regions[vor.point_region[centre + k]]
        poly = vor.vertices[region]
        x, y = poly[:, 0], poly[:, 1]
        areas[k] = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    return areas


def dump_realization_csv(real: Realization, path) -> None:
    """Write sites and users as rows ``entity_type, x_km, y_km, serving_index``.

    Typed users are tagged with their type and the index of the serving site
    in their own tier; untyped users carry their SBS index.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_type", "x_km", "y_km", "serving_index"])
        for k, (x, y) in enumerate(real.mbs_sites):
            writer.writerow(["MBS", f"{x:.12g}", f"{y:.12g}", k])
        for k, (x, y) in enumerate(real.sbs_sites):
            writer.writerow(["SBS", f"{x:.12g}", f"{y:.12g}", k])
        for k, (x, y) in enumerate(real.users):
            if real.user_types is None:
                kind, serving = "USER", real.user_sbs[k]
            else:
                t = int(real.user_types[k])
                kind = TYPE_NAMES[t]
                serving = real.user_mbs[k] if t in (MHU, MMU) else real.user_sbs[k]
            writer.writerow([kind, f"{x:.12g}", f"{y:.12g}", int(serving)])
        writer.writerow(["PROBE", f"{real.probe[0]:.12g}", f"{real.probe[1]:.12g}", real.probe_sbs])
