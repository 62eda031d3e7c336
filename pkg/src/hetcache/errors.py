"""Exception hierarchy shared by every hetcache module."""


class HetCacheError(Exception):
    """Base class for all errors raised by hetcache."""


class InvalidParameterError(HetCacheError, ValueError):
    """A model parameter is outside its admissible range."""


class DomainError(HetCacheError, ValueError):
    """A function argument lies outside the function's domain."""


class LowSNRError(HetCacheError):
    """The spectrum-efficiency lower bound is non-positive and therefore vacuous."""

    def __init__(self, tier: str, value: float):
        self.tier = tier
        self.value = value
        super().__init__(
            f"{tier} spectrum efficiency bound is {value:.6g} bit/s/Hz (<= 0); "
            "the mean-interference lower bound is vacuous at these parameters"
        )


class InfeasiblePartError(HetCacheError):
    """A rate requirement cannot be met even when the part carries no other user."""

    def __init__(self, part: str, zero_load_rate: float, requirement: float):
        self.part = part
        self.zero_load_rate = zero_load_rate
        self.requirement = requirement
        kind = "RAN" if part in ("MR", "SR") else "backhaul"
        super().__init__(
            f"{part}: {kind} requirement {requirement:.6g} bit/s exceeds "
            f"single-user rate {zero_load_rate:.6g} bit/s"
        )


class RegimeError(HetCacheError):
    """The analytic solution does not apply to the given load caps."""


class CatalogTooSmallError(HetCacheError):
    """The popularity tail cannot supply the mass a threshold requires."""


class ConfigError(HetCacheError):
    """A scenario file is syntactically valid but semantically wrong."""
