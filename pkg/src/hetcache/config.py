"""Scenario files: TOML in engineering units, converted once to base units.

Unknown keys anywhere are errors, so a misspelt unit suffix cannot silently
fall back to a default. See the README for the full schema.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .deployment import DEFAULT_DENSITY_GRID, CostModel
from .errors import ConfigError
from .montecarlo import InterferenceMode, SimConfig
from .popularity import PopularityModel, build_zipf
from .presets import GBPS, MBPS, MHZ, TABLE_III, TABLE_III_FILES, TABLE_III_SKEWNESS, dbm_per_mhz_to_w_per_hz
from .rates import NetworkParams


class SweepKind(str, enum.Enum):
    BUDGET_SWEEP = "BUDGET_SWEEP"
    PHI_CS_SURFACE = "PHI_CS_SURFACE"
    BACKHAUL_TRADE = "BACKHAUL_TRADE"
    DENSITY_BACKHAUL = "DENSITY_BACKHAUL"
    DENSITY_CACHE = "DENSITY_CACHE"
    VALIDATE_RATES = "VALIDATE_RATES"


# config key -> (NetworkParams field, factor to base units)
_NETWORK_KEYS = {
    "mbs_side_km": ("mbs_side_km", 1.0),
    "sbs_density_per_km2": ("sbs_density", 1.0),
    "mbs_bandwidth_mhz": ("mbs_bandwidth", MHZ),
    "sbs_bandwidth_mhz": ("sbs_bandwidth", MHZ),
    "mbs_power_w": ("mbs_power", 1.0),
    "sbs_power_w": ("sbs_power", 1.0),
    "pathloss_mbs": ("pathloss_mbs", 1.0),
    "pathloss_sbs": ("pathloss_sbs", 1.0),
    "interference_ratio_mbs": ("interference_ratio_mbs", 1.0),
    "interference_ratio_sbs": ("interference_ratio_sbs", 1.0),
    "sinr_cap": ("sinr_cap", 1.0),
    "mbs_backhaul_gbps": ("mbs_backhaul", GBPS),
    "sbs_backhaul_gbps": ("sbs_backhaul", GBPS),
    "rate_req_ran_mbps": ("rate_req_ran", MBPS),
    "rate_req_bh_mbps": ("rate_req_bh", MBPS),
    "gamma_shape": ("gamma_shape", 1.0),
}
_NOISE_KEY = "noise_dbm_per_mhz"

_SWEEP_KEYS = {
    SweepKind.BUDGET_SWEEP: {"budgets"},
    SweepKind.PHI_CS_SURFACE: {"budget", "grid"},
    SweepKind.BACKHAUL_TRADE: {"u_sbh_gbps"},
    SweepKind.DENSITY_BACKHAUL: {"budget", "densities", "cost"},
    SweepKind.DENSITY_CACHE: {"densities", "cost"},
    SweepKind.VALIDATE_RATES: {"loads"},
}
_REQUIRED_SWEEP_KEYS = {
    SweepKind.BUDGET_SWEEP: {"budgets"},
    SweepKind.PHI_CS_SURFACE: {"budget"},
    SweepKind.BACKHAUL_TRADE: {"u_sbh_gbps"},
    SweepKind.DENSITY_BACKHAUL: {"budget"},
    SweepKind.DENSITY_CACHE: set(),
    SweepKind.VALIDATE_RATES: {"loads"},
}
_COST_KEYS = {"k_bh", "zeta_bh", "k_c", "zeta_c", "budget"}
_SIM_KEYS = {"window_km", "trials", "seed", "mbs_fraction", "interference_mode"}
_TOP_KEYS = {"name", "network", "popularity", "sweeps", "sim"}


@dataclass(frozen=True)
class Sweep:
    kind: SweepKind
    budget: float | None = None
    values: tuple[float, ...] = ()
    grid: tuple[int, int] | None = None
    cost: CostModel | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    params: NetworkParams
    popularity: PopularityModel
    sweeps: tuple[Sweep, ...]
    sim: SimConfig = field(default_factory=SimConfig)


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _table(raw, where: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be a table")
    return raw


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    return float(value)


def parse_range(raw, where: str) -> tuple[float, ...]:
    """A strictly increasing list, or ``{start, stop, num, spacing}`` with linear or log spacing."""
    if isinstance(raw, list):
        values = [_number(v, where) for v in raw]
    elif isinstance(raw, dict):
        _reject_unknown(raw, {"start", "stop", "num", "spacing"}, where)
        for key in ("start", "stop", "num"):
            if key not in raw:
                raise ConfigError(f"{where} needs '{key}'")
        start, stop = _number(raw["start"], where), _number(raw["stop"], where)
        num = raw["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            raise ConfigError(f"{where}.num must be a positive integer")
        spacing = raw.get("spacing", "linear")
        if spacing == "linear":
            values = np.linspace(start, stop, num).tolist()
        elif spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"{where}: log spacing needs positive bounds")
            values = np.geomspace(start, stop, num).tolist()
        else:
            raise ConfigError(f"{where}.spacing must be 'linear' or 'log', got {spacing!r}")
    else:
        raise ConfigError(f"{where} must be a list or a range table")
    if not values:
        raise ConfigError(f"{where} is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{where} must be strictly increasing")
    return tuple(values)


def parse_grid(raw, where: str = "grid") -> tuple[int, int]:
    """``"NxM"`` or ``[N, M]``: N SBS cache sizes by M steering ratios."""
    if isinstance(raw, str):
        parts = raw.lower().split("x")
        try:
            dims = tuple(int(x) for x in parts)
        except ValueError:
            dims = ()
    elif isinstance(raw, list):
        dims = tuple(raw)
    else:
        dims = ()
    if len(dims) != 2 or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 2 for d in dims):
        raise ConfigError(f"{where} must be 'NxM' with N, M >= 2, got {raw!r}")
    return dims


def _network(raw: dict) -> NetworkParams:
    _reject_unknown(raw, set(_NETWORK_KEYS) | {_NOISE_KEY}, "[network]")
    values = dict(TABLE_III)
    for key, value in raw.items():
        if key == _NOISE_KEY:
            values["noise_psd"] = dbm_per_mhz_to_w_per_hz(_number(value, f"network.{key}"))
        else:
            name, factor = _NETWORK_KEYS[key]
            values[name] = _number(value, f"network.{key}") * factor
    return NetworkParams(**values)


def _popularity(raw: dict) -> PopularityModel:
    _reject_unknown(raw, {"files", "skewness"}, "[popularity]")
    files = raw.get("files", TABLE_III_FILES)
    if isinstance(files, bool) or not isinstance(files, int):
        raise ConfigError("popularity.files must be an integer")
    return build_zipf(files, _number(raw.get("skewness", TABLE_III_SKEWNESS), "popularity.skewness"))


def _sim(raw: dict) -> SimConfig:
    _reject_unknown(raw, _SIM_KEYS, "[sim]")
    kwargs = {}
    if "window_km" in raw:
        kwargs["window_km"] = _number(raw["window_km"], "sim.window_km")
    if "mbs_fraction" in raw:
        kwargs["mbs_fraction"] = _number(raw["mbs_fraction"], "sim.mbs_fraction")
    for key in ("trials", "seed"):
        if key in raw:
            if isinstance(raw[key], bool) or not isinstance(raw[key], int):
                raise ConfigError(f"sim.{key} must be an integer")
            kwargs[key] = raw[key]
    if "interference_mode" in raw:
        try:
            kwargs["interference_mode"] = InterferenceMode(raw["interference_mode"])
        except ValueError:
            raise ConfigError(f"sim.interference_mode must be MEAN_FIELD or SAMPLED, got {raw['interference_mode']!r}")
    return SimConfig(**kwargs)


def _cost(raw) -> CostModel:
    raw = _table(raw, "cost")
    _reject_unknown(raw, _COST_KEYS, "cost")
    return CostModel(**{k: _number(v, f"cost.{k}") for k, v in raw.items()})


def _sweep(kind_name: str, raw) -> Sweep:
    try:
        kind = SweepKind(kind_name)
    except ValueError:
        raise ConfigError(f"unknown sweep kind {kind_name!r}")
    where = f"[sweeps.{kind_name}]"
    raw = _table(raw, where)
    _reject_unknown(raw, _SWEEP_KEYS[kind], where)
    missing = sorted(_REQUIRED_SWEEP_KEYS[kind] - set(raw))
    if missing:
        raise ConfigError(f"{where} is missing {', '.join(missing)}")

    budget = _number(raw["budget"], f"{where}.budget") if "budget" in raw else None
    if budget is not None and budget < 0:
        raise ConfigError(f"{where}.budget must be nonnegative")
    if kind is SweepKind.PHI_CS_SURFACE and budget == 0:
        raise ConfigError(f"{where}.budget must be positive")
    grid = parse_grid(raw["grid"], f"{where}.grid") if "grid" in raw else None
    cost = _cost(raw["cost"]) if "cost" in raw else (CostModel() if "cost" in _SWEEP_KEYS[kind] else None)

    values: tuple[float, ...] = ()
    for key in ("budgets", "u_sbh_gbps", "densities", "loads"):
        if key in raw:
            values = parse_range(raw[key], f"{where}.{key}")
            if values[0] < 0 or (key == "densities" and values[0] <= 0):
                raise ConfigError(f"{where}.{key} must be {'positive' if key == 'densities' else 'nonnegative'}")
    if kind in (SweepKind.DENSITY_BACKHAUL, SweepKind.DENSITY_CACHE) and not values:
        values = DEFAULT_DENSITY_GRID
    return Sweep(kind, budget, values, grid, cost)


def parse_scenario(data: dict) -> Scenario:
    _reject_unknown(data, _TOP_KEYS, "the top level")
    name = data.get("name")
    if not isinstance(name, str) or not name.strip():
        raise ConfigError("scenario 'name' must be a nonempty string")
    if any(c in name for c in "/\\") or name in (".", ".."):
        raise ConfigError(f"scenario name {name!r} cannot be used as a file name")
    sweeps_raw = _table(data.get("sweeps", {}), "[sweeps]")
    if not sweeps_raw:
        raise ConfigError("scenario defines no sweeps")
    params = _network(_table(data.get("network", {}), "[network]"))
    popularity = _popularity(_table(data.get("popularity", {}), "[popularity]"))
    sim = _sim(_table(data.get("sim", {}), "[sim]"))
    sweeps = tuple(_sweep(kind, raw) for kind, raw in sweeps_raw.items())
    return Scenario(name, params, popularity, sweeps, sim)


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file.

    Raises ``tomllib.TOMLDecodeError`` for malformed files, and
    :class:`ConfigError` or another ``ValueError`` subclass from the package
    for well-formed files with invalid content.
    """
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return parse_scenario(data)
