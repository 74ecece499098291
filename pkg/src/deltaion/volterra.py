"""Time-domain solution of the bound-amplitude integral equation.

The unknown Y(t) satisfies

    Y(t) = eta(t) * (1 + int_0^t [2i + M(t - t')] Y(t') dt'),

and the bound amplitude is theta(t) = 1 + 2i int_0^t Y.  The kernel has an
s^-1/2 singularity at the origin, so the convolution is discretized by
product integration: Y is replaced by its piecewise-linear interpolant and
the kernel moments over each cell are computed exactly (closed-form
antiderivatives near the singularity, Gauss-Legendre farther out).  The
self-coupling of Y(t_n) is solved algebraically at each node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._hotloops import volterra_march
from .errors import DomainError, NumericalFailure, SolverInstability
from .kernel import DEFAULT_KERNEL, KernelEvaluator
from .model import DriveSpec, eval_eta


@dataclass(frozen=True)
class SolverConfig:
    """Discretization settings for :func:`solve_Y`.

    ``h`` is the time step and ``t_max`` the final time, both in units of
    the inverse bound-state frequency.  ``scheme_order`` 2 is the product
    trapezoid rule, 1 the product rectangle rule.
    """

    h: float = 0.005
    t_max: float = 100.0
    scheme_order: int = 2
    norm_check_interval: int = 0
    kernel_crossover: float = 2.0

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise DomainError(f"step h must be positive, got {self.h!r}")
        if not (self.t_max >= self.h):
            raise DomainError(f"t_max must be >= h, got t_max={self.t_max!r}, h={self.h!r}")
        if self.scheme_order not in (1, 2):
            raise DomainError(f"scheme_order must be 1 or 2, got {self.scheme_order!r}")
        if self.norm_check_interval < 0:
            raise DomainError("norm_check_interval must be >= 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.h))

    def validate_for(self, drive: DriveSpec) -> None:
        if self.h * drive.omega >= 0.2:
            raise DomainError(
                f"step h={self.h} does not resolve the drive: h*omega={self.h * drive.omega:.3f} >= 0.2"
            )


@dataclass
class Trajectory:
    """Samples of Y, theta and the survival probability on ``t_j = j h``."""

    times: np.ndarray
    Y: np.ndarray
    theta: np.ndarray
    drive: DriveSpec
    config: SolverConfig
    survival: np.ndarray = field(init=False)

    def __post_init__(self):
        self.survival = self.theta.real**2 + self.theta.imag**2

    @property
    def h(self) -> float:
        return self.config.h

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def index_of(self, t: float) -> int:
        j = int(round(t / self.h))
        if j < 0 or j >= len(self.times) or abs(j * self.h - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"time {t} is not a grid node of this trajectory (h={self.h}, t_max={self.t_max})")
        return j


def convolution_weights(h: float, n: int, order: int = 2, kernel: KernelEvaluator | None = None):
    """Weights ``w`` and end weights ``w_end`` of the discrete convolution.

    At step n the integral is ``w[0] Y_n + sum_{k=1}^{n-1} w[k] Y_{n-k} + w_end[n] Y_0``.
    """
    kernel = kernel or DEFAULT_KERNEL
    A, B = kernel.cell_moments(h, n)
    w = np.zeros(n + 1, dtype=complex)
    w_end = np.zeros(n + 1, dtype=complex)
    if order == 2:
        lead = A - B / h  # weight of the cell's later node
        trail = B / h  # weight of the cell's earlier node
        w[:n] = lead
        w[1:] += trail
        # Y_0 at step n only sees the trailing part of cell n
        w_end[1:] = trail
    else:
        # right-endpoint rectangle: Y_0 never enters
        w[:n] = A
    return w, w_end


def solve_Y(drive: DriveSpec, cfg: SolverConfig) -> Trajectory:
    """March the discretized integral equation from t = 0 to ``cfg.t_max``."""
    cfg.validate_for(drive)
    n = cfg.n_steps
    h = cfg.h
    times = h * np.arange(n + 1)
    if drive.is_zero():
        zero = np.zeros(n + 1, dtype=complex)
        return Trajectory(times, zero, np.ones(n + 1, dtype=complex), drive, cfg)

    eta = np.asarray(eval_eta(drive, times), dtype=float)
    kernel = KernelEvaluator(crossover_s=cfg.kernel_crossover)
    w, w_end = convolution_weights(h, n, cfg.scheme_order, kernel)
    y, stop, status = volterra_march(eta, w, w_end, complex(eta[0]))
    if status == 1:
        raise NumericalFailure(
            "implicit self-coupling is singular; reduce the step",
            module="volterra",
            operation="solve_Y",
            params={"node": stop, "h": h},
        )
    if status == 2:
        raise SolverInstability(
            "|Y| exceeded 1e10",
            module="volterra",
            operation="solve_Y",
            params={"node": stop, "h": h},
        )
    theta = integrate_theta(y, h, cfg.scheme_order)
    return Trajectory(times, y, theta, drive, cfg)


def integrate_theta(y: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """theta_n = 1 + 2i int_0^{t_n} Y with the quadrature matching the scheme."""
    theta = np.empty_like(y)
    theta[0] = 1.0
    if order == 2:
        incr = 1j * h * (y[1:] + y[:-1])
    else:
        incr = 2j * h * y[1:]
    theta[1:] = 1.0 + np.cumsum(incr)
    return theta


def cycle_average(traj: Trajectory, values: np.ndarray | None = None):
    """Running mean of ``values`` (default: survival) over one drive period.

    Returns ``(t_mid, avg)`` for windows fully inside the trajectory.
    """
    vals = traj.survival if values is None else np.asarray(values)
    h = traj.h
    period = traj.drive.period
    cum = np.concatenate([[0.0], np.cumsum(0.5 * h * (vals[1:] + vals[:-1]))])
    t = traj.times
    half = 0.5 * period
    mask = (t >= half) & (t <= t[-1] - half)
    tm = t[mask]
    upper = np.interp(tm + half, t, cum)
    lower = np.interp(tm - half, t, cum)
    return tm, (upper - lower) / period


@dataclass(frozen=True)
class RateFit:
    gamma: float
    intercept: float
    r_squared: float
    t_start: float
    t_end: float


def fit_decay_rate(traj: Trajectory, t_start: float, t_end: float | None = None) -> RateFit:
    """Least-squares slope of ln(cycle-averaged survival) on ``[t_start, t_end]``."""
    t_end = traj.t_max if t_end is None else t_end
    tm, avg = cycle_average(traj)
    sel = (tm >= t_start) & (tm <= t_end) & (avg > 0)
    if sel.sum() < 3:
        raise DomainError("fit window holds fewer than 3 averaged samples")
    x = tm[sel]
    yv = np.log(avg[sel])
    slope, icpt = np.polyfit(x, yv, 1)
    resid = yv - (slope * x + icpt)
    ss_tot = float(np.sum((yv - yv.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(-float(slope), float(icpt), r2, float(x[0]), float(x[-1]))


def fit_power_law(traj: Trajectory, t_start: float, t_end: float | None = None) -> tuple[float, float]:
    """Slope and R^2 of log10(cycle-averaged survival) against log10 t."""
    t_end = traj.t_max if t_end is None else t_end
    tm, avg = cycle_average(traj)
    sel = (tm >= t_start) & (tm <= t_end) & (avg > 0)
    if sel.sum() < 3:
        raise DomainError("fit window holds fewer than 3 averaged samples")
    x = np.log10(tm[sel])
    yv = np.log10(avg[sel])
    slope, icpt = np.polyfit(x, yv, 1)
    resid = yv - (slope * x + icpt)
    r2 = 1.0 - float(np.sum(resid**2)) / float(np.sum((yv - yv.mean()) ** 2))
    return float(slope), r2


@dataclass(frozen=True)
class OrderStudy:
    """Self-convergence study of theta(t_max) under step halving."""

    steps: tuple[float, ...]
    differences: tuple[float, ...]
    orders: tuple[float, ...]
    order: float | None
    status: str  # "ok", "exact" or "indeterminate"
    nominal: int

    @property
    def passed(self) -> bool:
        if self.status == "exact":
            return True
        return self.order is not None and self.order >= self.nominal - 0.3


def convergence_order_study(drive: DriveSpec, cfg: SolverConfig, refinements: int = 3) -> OrderStudy:
    """Estimate the empirical order from runs at h, h/2, h/4, ...

    ``refinements`` is the number of runs.  Successive differences of
    theta(t_max) give error ratios; the order is log2 of the last ratio.
    """
    if refinements < 3:
        raise DomainError("need at least 3 refinements for an order estimate")
    steps = [cfg.h / 2**i for i in range(refinements)]
    finals = []
    for h in steps:
        sub = SolverConfig(
            h=h,
            t_max=cfg.t_max,
            scheme_order=cfg.scheme_order,
            kernel_crossover=cfg.kernel_crossover,
        )
        if abs(sub.n_steps * h - cfg.t_max) > 1e-9 * cfg.t_max:
            raise DomainError("t_max must be a multiple of every refined step")
        finals.append(solve_Y(drive, sub).theta[-1])
    diffs = [abs(finals[i] - finals[i + 1]) for i in range(refinements - 1)]
    if max(diffs) == 0.0:
        return OrderStudy(tuple(steps), tuple(diffs), (), None, "exact", cfg.scheme_order)
    if any(d == 0.0 for d in diffs) or any(diffs[i + 1] >= diffs[i] for i in range(len(diffs) - 1)):
        return OrderStudy(tuple(steps), tuple(diffs), (), None, "indeterminate", cfg.scheme_order)
    orders = tuple(math.log2(diffs[i] / diffs[i + 1]) for i in range(len(diffs) - 1))
    return OrderStudy(tuple(steps), tuple(diffs), orders, orders[-1], "ok", cfg.scheme_order)
