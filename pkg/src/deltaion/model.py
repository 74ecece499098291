"""Physical model: a 1D attractive delta well with a parametric drive.

All quantities are dimensionless, in units where the binding momentum,
the bound-state frequency, hbar, 2m and g/2 are all equal to one.  In
these units the bound state has energy -1, a continuum state of momentum
k has energy k**2, and the drive multiplies the well strength by
``1 + eta(t)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class UnitsConvention:
    """The constant set fixing the units; every interface uses these."""

    p0: float = 1.0
    omega0: float = 1.0
    hbar: float = 1.0
    two_m: float = 1.0
    half_g: float = 1.0


UNITS = UnitsConvention()


@dataclass(frozen=True)
class BoundState:
    """The single bound state ``u_b(y) = exp(-|y|)``."""

    p0: float = 1.0
    energy: float = -1.0

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return math.sqrt(self.p0) * np.exp(-self.p0 * np.abs(y))


@dataclass(frozen=True)
class ContinuumState:
    """Generalized eigenfunction of momentum ``k`` (delta-normalized)."""

    k: float

    @property
    def energy(self) -> float:
        return self.k * self.k

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        ak = abs(self.k)
        return (np.exp(1j * self.k * y) - np.exp(1j * ak * np.abs(y)) / (1.0 + 1j * ak)) / math.sqrt(
            2.0 * math.pi
        )


@dataclass(frozen=True)
class DriveSpec:
    """Periodic modulation ``eta(t) = sum_j A_j sin(j w t) + B_j cos(j w t)``.

    ``harmonics[j-1]`` holds the pair ``(A_j, B_j)``.
    """

    omega: float
    harmonics: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"drive frequency must be positive, got {self.omega!r}")
        harm = tuple((float(a), float(b)) for a, b in self.harmonics)
        if not harm:
            raise DomainError("drive needs at least one harmonic")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in harm):
            raise DomainError("harmonic coefficients must be finite")
        object.__setattr__(self, "harmonics", harm)

    @classmethod
    def single(cls, omega: float, r: float) -> "DriveSpec":
        """The one-harmonic drive ``r sin(omega t)``."""
        return cls(omega=float(omega), harmonics=((float(r), 0.0),))

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def is_single_harmonic(self) -> bool:
        return len(self.harmonics) == 1 and self.harmonics[0][1] == 0.0

    @property
    def r(self) -> float:
        if not self.is_single_harmonic():
            raise DomainError("amplitude r is defined only for a pure sine drive")
        return self.harmonics[0][0]

    def is_zero(self) -> bool:
        return all(a == 0.0 and b == 0.0 for a, b in self.harmonics)

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "harmonics": [{"j": j, "A": a, "B": b} for j, (a, b) in enumerate(self.harmonics, start=1)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DriveSpec":
        try:
            omega = float(data["omega"])
            entries = data["harmonics"]
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed drive specification: {exc}") from None
        n = max((int(e["j"]) for e in entries), default=0)
        coeffs = [[0.0, 0.0] for _ in range(n)]
        for e in entries:
            j = int(e["j"])
            if j < 1:
                raise DomainError(f"harmonic index must be >= 1, got {j}")
            coeffs[j - 1] = [float(e.get("A", 0.0)), float(e.get("B", 0.0))]
        return cls(omega=omega, harmonics=tuple(tuple(c) for c in coeffs))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DriveSpec":
        return cls.from_dict(json.loads(text))


def eval_eta(spec: DriveSpec, t):
    """Evaluate the drive at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for j, (a, b) in enumerate(spec.harmonics, start=1):
        phase = j * spec.omega * t
        if a:
            out = out + a * np.sin(phase)
        if b:
            out = out + b * np.cos(phase)
    return out if out.ndim else float(out)


def bound_continuum_coupling(k):
    """Squared matrix element ``|<u_b| delta |u(k)>|^2 = k^2 / (2 pi (1 + k^2))``."""
    k = np.asarray(k, dtype=float)
    k2 = k * k
    out = k2 / (2.0 * math.pi * (1.0 + k2))
    return out if out.ndim else float(out)


def channel_momenta(omega: float, count: int = 4) -> list[float]:
    """Outgoing momenta ``sqrt(n omega - 1)`` of the first ``count`` open channels."""
    n0 = photon_order(omega)
    return [math.sqrt(n * omega - 1.0) for n in range(n0, n0 + count) if n * omega > 1.0]


def photon_order(omega: float) -> int:
    """Smallest n with ``n * omega > 1``."""
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    n = max(1, math.ceil(1.0 / omega))
    if n * omega <= 1.0:
        n += 1
    return n

