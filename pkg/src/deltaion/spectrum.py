"""Photoelectron amplitudes, ionized fraction and the position-space wave.

The continuum amplitude at momentum k is

    Theta(k, t) = 2|k| / (sqrt(2 pi) (1 - i|k|)) * int_0^t Y(s) exp(i (1 + k^2) s) ds,

evaluated with Filon weights (the piecewise-linear Y is integrated exactly
against the exponential), so large k costs no extra time resolution.

At time t the integrand |Theta|^2 oscillates in kappa = 1 + k^2 with
period ~ 2 pi / t.  The default momentum grid therefore uses Gauss-Legendre
panels of fixed width in kappa (at most pi / t), plus a mapped rule for the
k^-4 tail beyond ``k_core``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._hotloops import filon_sums
from .errors import DomainError
from .model import BoundState, DriveSpec, photon_order
from .volterra import Trajectory

_PANEL_NODES = 6
_TAIL_NODES = 24


@dataclass
class MomentumSpectrum:
    """Theta(k, t_snapshot) on ``k >= 0``; ``weights`` integrate over k >= 0."""

    k_grid: np.ndarray
    Theta: np.ndarray
    t_snapshot: float
    weights: np.ndarray | None = None

    @property
    def density(self) -> np.ndarray:
        return self.Theta.real**2 + self.Theta.imag**2


def default_core_momentum(drive: DriveSpec) -> float:
    n = photon_order(drive.omega)
    return max(6.0, 2.0 * math.sqrt((n + 3) * drive.omega))


def default_k_grid(drive: DriveSpec, t_snapshot: float, k_core: float | None = None):
    """Nodes and weights for integrals over ``k in [0, inf)``."""
    k_core = default_core_momentum(drive) if k_core is None else float(k_core)
    if k_core <= 0:
        raise DomainError("k_core must be positive")
    dkappa = 0.25 if t_snapshot <= 0 else min(0.25, math.pi / t_snapshot)
    n_panels = max(1, math.ceil(k_core**2 / dkappa))
    kb = np.sqrt(np.linspace(0.0, k_core**2, n_panels + 1))
    x, w = np.polynomial.legendre.leggauss(_PANEL_NODES)
    half = 0.5 * np.diff(kb)
    mid = 0.5 * (kb[1:] + kb[:-1])
    k_core_nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    w_core = (half[:, None] * w[None, :]).ravel()
    # tail: k = k_core / u, u in (0, 1]
    xu, wu = np.polynomial.legendre.leggauss(_TAIL_NODES)
    u = 0.5 * (xu + 1.0)
    k_tail = k_core / u
    w_tail = 0.5 * wu * k_core / (u * u)
    order = np.argsort(k_tail)
    return np.concatenate([k_core_nodes, k_tail[order]]), np.concatenate([w_core, w_tail[order]])


def _prefactor(k: np.ndarray) -> np.ndarray:
    ak = np.abs(k)
    return 2.0 * ak / (math.sqrt(2.0 * math.pi) * (1.0 - 1j * ak))


def compute_spectra(traj: Trajectory, times, k_grid=None, weights=None) -> list[MomentumSpectrum]:
    """Spectra at several snapshot times in one pass over the trajectory.

    With ``k_grid=None`` a default grid sized for the latest snapshot is
    used, so all returned spectra share nodes.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(times > traj.t_max + 1e-9 * max(1.0, traj.t_max)):
        raise DomainError(f"snapshot times must lie in [0, {traj.t_max}]")
    idx = np.array([traj.index_of(float(t)) for t in times], dtype=np.int64)
    order = np.argsort(idx, kind="stable")
    if k_grid is None:
        k_grid, weights = default_k_grid(traj.drive, float(times.max()))
    k = np.asarray(k_grid, dtype=float)
    kappa = 1.0 + k * k
    sums = filon_sums(np.ascontiguousarray(traj.Y), traj.h, kappa, idx[order])
    pref = _prefactor(k)
    out: list[MomentumSpectrum | None] = [None] * len(times)
    for row, pos in enumerate(order):
        theta_k = pref * sums[row]
        out[pos] = MomentumSpectrum(k.copy(), theta_k, float(times[pos]), None if weights is None else np.asarray(weights))
    return out  # type: ignore[return-value]


def compute_spectrum(traj: Trajectory, drive: DriveSpec | None = None, k_grid=None, t_snapshot: float | None = None):
    """Theta(k, t_snapshot) for one snapshot (default: the end of the run)."""
    if drive is not None and drive != traj.drive:
        raise DomainError("drive does not match the trajectory")
    t_snapshot = traj.t_max if t_snapshot is None else t_snapshot
    if t_snapshot > traj.t_max + 1e-9 * max(1.0, traj.t_max):
        raise DomainError(f"snapshot {t_snapshot} lies beyond the trajectory end {traj.t_max}")
    return compute_spectra(traj, [t_snapshot], k_grid=k_grid)[0]


def ionized_fraction(spectrum: MomentumSpectrum) -> float:
    """Integral of |Theta|^2 over the whole k line (twice the k >= 0 part)."""
    dens = spectrum.density
    k = spectrum.k_grid
    if spectrum.weights is not None:
        contrib = spectrum.weights * dens
        total = 2.0 * float(np.sum(contrib))
        last = 2.0 * float(contrib[-1])
    else:
        if len(k) < 2:
            raise DomainError("need at least two momentum nodes")
        cells = 0.5 * (dens[1:] + dens[:-1]) * np.diff(k)
        total = 2.0 * float(np.sum(cells))
        last = 2.0 * float(cells[-1])
    if total > 0 and last > 1e-6 * total:
        warnings.warn(
            f"momentum grid truncates the spectrum tail: last cell holds {last / total:.2e} of the total",
            RuntimeWarning,
            stacklevel=2,
        )
    return total


def unitarity_defects(traj: Trajectory, n_checkpoints: int = 10, times=None) -> tuple[np.ndarray, np.ndarray]:
    """``|theta|^2 + int |Theta|^2 dk - 1`` at evenly spaced checkpoints."""
    if times is None:
        n_total = len(traj.times) - 1
        idx = np.unique(np.linspace(0, n_total, n_checkpoints + 1).round().astype(int)[1:])
        times = traj.times[idx]
    times = np.asarray(times, dtype=float)
    spectra = compute_spectra(traj, times)
    defects = np.array(
        [traj.survival[traj.index_of(float(t))] + ionized_fraction(sp) - 1.0 for t, sp in zip(times, spectra)]
    )
    return times, defects


def reconstruct_wavefunction(traj: Trajectory, spectrum: MomentumSpectrum, y_grid, t: float | None = None):
    """psi(y, t) = theta u_b(y) e^{it} + int Theta(k) u(k, y) e^{-i k^2 t} dk."""
    t = spectrum.t_snapshot if t is None else float(t)
    if abs(t - spectrum.t_snapshot) > 1e-9 * max(1.0, t):
        raise DomainError("spectrum snapshot and requested time differ")
    if spectrum.weights is None:
        raise DomainError("wavefunction reconstruction needs a spectrum with quadrature weights")
    y = np.asarray(y_grid, dtype=float)
    theta_t = traj.theta[traj.index_of(t)]
    psi = theta_t * BoundState()(y) * np.exp(1j * t)
    k = spectrum.k_grid
    coeff = spectrum.weights * spectrum.Theta * np.exp(-1j * k * k * t) / math.sqrt(2.0 * math.pi)
    ay = np.abs(y)
    # +k and -k folded: u(k,y) + u(-k,y) = (2 cos ky - 2 e^{i k|y|}/(1+ik)) / sqrt(2 pi)
    for start in range(0, len(k), 2048):
        sl = slice(start, start + 2048)
        kk = k[sl]
        basis = 2.0 * np.cos(np.outer(y, kk)) - 2.0 * np.exp(1j * np.outer(ay, kk)) / (1.0 + 1j * kk)
        psi = psi + basis @ coeff[sl]
    return psi
