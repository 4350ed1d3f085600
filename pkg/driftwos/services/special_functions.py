"""Modified Bessel functions I_v and the sphere normalizer kappa.

kappa(z) = (z/2)^(d/2-1) / (Gamma(d/2) I_{d/2-1}(z)) makes the density
kappa(r|b|/sigma^2) exp(b·(y-x)/sigma^2) integrate to one over a sphere of
radius r. It is evaluated in log space throughout because I_v(z) overflows long
before kappa underflows.
"""

import math
import sys

import numpy as np
from scipy import special


class SpecialFunctionError(Exception):
    """Expected domain or range error in special function evaluation."""


class BesselDomainError(SpecialFunctionError, ValueError):
    """Order or argument outside the supported real range."""


class BesselOverflowError(SpecialFunctionError, OverflowError):
    """I_v(z) is not representable; use log_bessel_i."""


MIN_ORDER = -0.5


def _check_arguments(v: float, z: float) -> None:
    if not math.isfinite(v) or v < MIN_ORDER:
        raise BesselDomainError(f"Bessel order must be >= -1/2, got {v}")
    if not math.isfinite(z) or z < 0:
        raise BesselDomainError(f"Bessel argument must be finite and >= 0, got {z}")


def bessel_i(v: float, z: float) -> float:
    """Modified Bessel function of the first kind, I_v(z), for real v >= -1/2.

    At z = 0 the limit is returned: 1 for v = 0, 0 for v > 0. Negative orders
    diverge there and raise BesselDomainError.
    """
    _check_arguments(v, z)
    if z == 0.0:
        if v == 0.0:
            return 1.0
        if v > 0.0:
            return 0.0
        raise BesselDomainError(f"I_{v}(0) is infinite")
    value = float(special.iv(v, z))
    if not math.isfinite(value):
        raise BesselOverflowError(f"I_{v}({z}) overflows double precision")
    return value


def _log_bessel_series(v: float, z: float) -> float:
    # ln of (z/2)^v / Gamma(v+1) * sum_k (z^2/4)^k Gamma(v+1) / (k! Gamma(v+k+1))
    quarter = 0.25 * z * z
    term = 1.0
    total = 1.0
    k = 0
    while term > 1e-17 * total:
        k += 1
        term *= quarter / (k * (v + k))
        total += term
    return v * math.log(0.5 * z) - float(special.gammaln(v + 1.0)) + math.log(total)


def log_bessel_i(v: float, z: float) -> float:
    """ln I_v(z) for z > 0, finite far beyond the overflow point of I_v.

    Where I_v(z) e^{-z} drops below the normal range (small z, large v) the
    power series is summed in log space instead.
    """
    _check_arguments(v, z)
    if z == 0.0:
        raise BesselDomainError("log_bessel_i needs z > 0")
    # ive(v, z) = I_v(z) e^{-z}
    scaled = float(special.ive(v, z))
    if scaled < sys.float_info.min:
        return _log_bessel_series(v, z)
    return math.log(scaled) + z


def log_kappa(d: int, z: float) -> float:
    """ln kappa(z) in dimension d; exactly 0 at z = 0."""
    if d < 1:
        raise BesselDomainError(f"dimension must be >= 1, got {d}")
    if not math.isfinite(z) or z < 0:
        raise BesselDomainError(f"kappa argument must be finite and >= 0, got {z}")
    if z == 0.0:
        return 0.0
    v = 0.5 * d - 1.0
    return v * math.log(0.5 * z) - float(special.gammaln(0.5 * d)) - log_bessel_i(v, z)


def kappa(d: int, z: float) -> float:
    """Normalizer kappa(z) in dimension d, with 0 < kappa <= 1 and kappa(0) = 1."""
    return math.exp(log_kappa(d, z))


def mean_resultant_length(d: int, concentration: float) -> float:
    """E[mu·omega] = I_{d/2}(k) / I_{d/2-1}(k) for the exit law of concentration k."""
    if concentration == 0.0:
        return 0.0
    v = 0.5 * d - 1.0
    if d == 1:
        return math.tanh(concentration)
    ratio = special.ive(v + 1.0, concentration) / special.ive(v, concentration)
    return float(np.clip(ratio, 0.0, 1.0))
