"""Independent reference implementations used to check the package.

Nothing here imports the package's numerical code: every quantity is
recomputed from first principles (series, quadrature, sampling or plain
loops) so that agreement is evidence rather than tautology.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import integrate, stats

EULER_GAMMA = float(mpmath.euler)


def zipf(file_count: int, skewness: float) -> list[float]:
    weights = [mpmath.mpf(f) ** (-skewness) for f in range(1, file_count + 1)]
    total = mpmath.fsum(weights)
    return [float(w / total) for w in weights]


def partial_mass(q: list[float], x: float) -> float:
    """Piecewise-linear cumulative popularity by explicit summation."""
    whole = int(math.floor(x))
    mass = math.fsum(q[:whole])
    if whole < len(q):
        mass += (x - whole) * q[whole]
    return mass


def poisson_share(mean: float) -> float:
    """E[1/(N+1)], N ~ Poisson(mean), by summing the series."""
    with mpmath.workdps(40):
        m = mpmath.mpf(mean)
        terms = int(mean + 40 * math.sqrt(mean) + 60)
        return float(mpmath.fsum(mpmath.exp(-m) * m**n / mpmath.factorial(n) / (n + 1) for n in range(terms)))


def gamma_poisson_share(load_ratio: float, kappa: float) -> float:
    """E[1/(N+1)], N ~ Poisson(x·A), A ~ Gamma(kappa, 1/kappa), by quadrature over A."""
    dist = stats.gamma(kappa, scale=1 / kappa)

    def conditional(a):
        y = load_ratio * a
        return 1.0 if y == 0 else -math.expm1(-y) / y

    value, _ = integrate.quad(lambda a: conditional(a) * dist.pdf(a), 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=500)
    return value


def sampled_poisson_share(rng, mean: float, draws: int) -> float:
    n = rng.poisson(mean, size=draws)
    return float(np.mean(1.0 / (n + 1)))


def sampled_gamma_poisson_share(rng, load_ratio: float, kappa: float, draws: int) -> float:
    area = rng.gamma(kappa, 1 / kappa, size=draws)
    n = rng.poisson(load_ratio * area)
    return float(np.mean(1.0 / (n + 1)))


def hex_density(side_km: float) -> float:
    return 2.0 / (3.0 * math.sqrt(3.0) * side_km**2)


def snr_at_1m(power: float, noise_psd: float, bandwidth: float, theta: float) -> float:
    return power / ((1 + theta) * noise_psd * bandwidth)


def mbs_spectral_efficiency(coeff: float, alpha: float, radius_m: float, cap: float) -> float:
    """E[log2(1 + min(cap, coeff·r^-alpha))], r uniform in a disc, by quadrature."""
    knee = (coeff / cap) ** (1 / alpha)
    f = lambda r: math.log2(1 + min(cap, coeff * r**-alpha)) * 2 * r / radius_m**2
    pts = [knee] if 0 < knee < radius_m else None
    value, _ = integrate.quad(f, 0, radius_m, points=pts, epsabs=1e-12, epsrel=1e-12, limit=500)
    return value


def sbs_spectral_efficiency(coeff: float, alpha: float, density_m2: float) -> float:
    """E[log2(1 + coeff·d^-alpha)], d Rayleigh with parameter density_m2 (no cap), by quadrature."""
    lam = math.pi * density_m2
    f = lambda d: math.log2(1 + coeff * d**-alpha) * 2 * lam * d * math.exp(-lam * d * d)
    scale = 1 / math.sqrt(lam)
    value, _ = integrate.quad(f, 0, 50 * scale, points=[0.1 * scale, scale, 3 * scale],
                              epsabs=1e-12, epsrel=1e-12, limit=1000)
    return value


def scan_root(rate, requirement: float, hi: float, points: int = 10**6) -> tuple[float, float]:
    """Bracket the crossing of a decreasing vectorised ``rate`` on a uniform grid."""
    x = np.linspace(0.0, hi, points + 1)
    ok = rate(x) >= requirement
    k = int(np.nonzero(ok)[0].max())
    return float(x[k]), float(x[min(k + 1, points)])


def part_capacities(caps: dict, sbs_hit: float, mbs_hit: float, phi: float) -> dict:
    """Per-part capacities by direct substitution; zero load gives inf."""
    miss = 1.0 - sbs_hit - mbs_hit
    loads = {
        "MR": mbs_hit + miss * (1 - phi),
        "MBH": miss * (1 - phi),
        "SR": sbs_hit + miss * phi,
        "SBH": miss * phi,
    }
    return {k: (caps[k] / v if v > 0 else math.inf) for k, v in loads.items()}
