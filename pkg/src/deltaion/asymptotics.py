"""Small-amplitude closed forms for the decay rate and the Stark shift.

In the n-photon interval ``1/n < omega < 1/(n-1)`` the leading decay rate is

    Gamma = 2^(2-2n) sqrt(n omega - 1) / prod_{m<n} (1 - sqrt(1 - m omega))^2
            * r^(2n) / (n omega).

These are oracles for the ladder solver, valid away from the channel
thresholds ``omega = 1/j``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError
from .model import bound_continuum_coupling, photon_order

RESONANCE_COEFF = 2**0.25 / 8 - 2**0.75 / 16
RESONANCE_MARGIN = 3.0  # near-resonance band is |omega - 1/j| < 3 r^2


@dataclass(frozen=True)
class GammaEstimate:
    gamma: float
    photon_order: int
    validity: str  # "interior", "near_resonance" or "invalid"


def near_resonance(omega: float, r: float, n: int | None = None) -> bool:
    """True when ``|omega - 1/j| < 3 r^2`` for some ``j <= n`` (default: photon order)."""
    n = photon_order(omega) if n is None else n
    band = RESONANCE_MARGIN * r * r
    return any(abs(omega - 1.0 / j) < band for j in range(1, n + 1))


def staircase_coefficient(omega: float, n: int | None = None) -> float:
    """The factor c_n(omega) in ``Gamma = c_n(omega) r^(2n)``."""
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    n = photon_order(omega) if n is None else n
    if n * omega <= 1.0:
        return 0.0
    prod = 1.0
    for m in range(1, n):
        prod *= (1.0 - math.sqrt(1.0 - m * omega)) ** 2
    return 2.0 ** (2 - 2 * n) * math.sqrt(n * omega - 1.0) / prod / (n * omega)


def gamma_staircase(omega: float, r: float) -> GammaEstimate:
    """Leading-order decay rate in the photon order's interval."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    if r < 0:
        raise DomainError(f"r must be non-negative, got {r!r}")
    n = photon_order(omega)
    gamma = staircase_coefficient(omega, n) * r ** (2 * n)
    if not math.isfinite(gamma):
        return GammaEstimate(0.0, n, "invalid")
    validity = "near_resonance" if near_resonance(omega, r, n) else "interior"
    return GammaEstimate(gamma, n, validity)


def golden_rule_rate(omega: float, r: float) -> float:
    """One-photon rate assembled from the bound-continuum coupling.

    The rate is the squared drive amplitude times the squared matrix element
    ``k^2 / (2 pi (1 + k^2))`` at ``k = sqrt(omega - 1)`` times the density of
    states ``2 pi / k``; the result is checked against ``k r^2 / omega``.
    """
    if omega <= 1.0:
        raise DomainError(f"one-photon channel is closed for omega={omega!r} <= 1")
    k = math.sqrt(omega - 1.0)
    matrix_element = bound_continuum_coupling(k)  # k^2 / (2 pi (1 + k^2))
    if k == 0:
        return 0.0
    density_of_states = 2.0 * math.pi / k
    amplitude = r * r
    rate = amplitude * matrix_element * density_of_states
    closed = k * r * r / omega
    if not math.isclose(rate, closed, rel_tol=1e-12, abs_tol=1e-300):
        raise AssertionError(f"golden-rule assembly {rate!r} differs from closed form {closed!r}")
    return rate


def resonance_rate(r: float) -> float:
    """Rate at the Stark-shifted threshold ``omega = 1 + r^2/sqrt(2)``."""
    if r > 0.3:
        warnings.warn("resonance law is a small-r result; r > 0.3 is outside its range", RuntimeWarning, stacklevel=2)
    return RESONANCE_COEFF * r**3


def stark_shift_estimate(r: float) -> float:
    """Displacement ``r^2/sqrt(2)`` of the one-photon threshold."""
    if r < 0:
        raise DomainError("r must be non-negative")
    return r * r / math.sqrt(2.0)
