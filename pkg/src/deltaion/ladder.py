"""Laplace-domain route for the sine drive ``eta = r sin(omega t)``.

The Laplace transform y(p) of Y obeys a functional equation linking y(p)
to y(p +- i omega).  Sampling it on the ladder ``q_m = p + i m omega`` and
writing ``x_m = y(q_m) / D(q_m)`` with ``D(q) = sqrt(1 - i q) - 1`` gives the
symmetric three-term system

    D_m x_m - a (x_{m+1} - x_{m-1}) = f_m,   a = i r / 2,
    f_m = r omega / (omega^2 + q_m^2).

The minimal (decaying) solutions in both directions are obtained by
backward recurrence, i.e. continued fractions.  A resonance pole of y is a
zero of the secular function

    S(p) = D_0 - a R^+_1 + a R^-_{-1},

where ``R^+_1 = x_1/x_0`` and ``R^-_{-1} = x_{-1}/x_0`` are the minimal ratios.

Branch rule: ``sqrt(1 - i q)`` is taken as ``exp(-i pi/4) sqrt(q + i)`` with
the principal root.  This coincides with the principal root of ``1 - i q``
for Re p > 0 and continues analytically across the imaginary p-axis, with
the cuts running horizontally to the left of the branch points
``p = -i (1 + m omega)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import gamma_staircase, near_resonance
from .errors import ConvergenceError, DomainError, NumericalFailure

_ROT_INV = cmath.exp(-0.25j * math.pi)
START_DEPTH = 32
GAMMA_RESOLUTION = 64 * 2.0**-52
MAX_DEPTH = 2**14


def denominator(q: complex) -> complex:
    """``D(q) = sqrt(1 - i q) - 1`` under the package branch rule."""
    w = q + 1j
    if abs(w) < 1e-12:
        raise NumericalFailure(
            "ladder rung sits on a branch point", module="ladder", operation="denominator", params={"q": q}
        )
    return _ROT_INV * cmath.sqrt(w) - 1.0


@dataclass(frozen=True)
class LadderProblem:
    """Ladder rungs ``base_p + i m omega`` for ``|m| <= depth``."""

    base_p: complex
    omega: float
    r: float
    depth: int = START_DEPTH

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if self.r < 0:
            raise DomainError("r must be non-negative")
        if self.depth < 8:
            raise DomainError("ladder depth must be at least 8")

    def with_depth(self, depth: int) -> "LadderProblem":
        return LadderProblem(self.base_p, self.omega, self.r, depth)

    def rung(self, m: int) -> complex:
        return complex(self.base_p) + 1j * m * self.omega


def ladder_coefficients(prob: LadderProblem, m: int) -> tuple[complex, complex]:
    """Diagonal ``D_m`` and source ``f_m`` of row m."""
    if abs(m) > prob.depth:
        raise DomainError(f"rung {m} beyond depth {prob.depth}")
    q = prob.rung(m)
    den = prob.omega**2 + q * q
    if abs(den) < 1e-300:
        raise NumericalFailure(
            "source term has a pole at this rung", module="ladder", operation="ladder_coefficients", params={"q": q}
        )
    return denominator(q), prob.r * prob.omega / den


def _sweeps(prob: LadderProblem):
    """Backward eliminations from both ends.

    Returns ``(R_up, g_up, R_dn, g_dn)`` for the rows adjacent to m = 0:
    ``x_1 = R_up x_0 + g_up`` and ``x_{-1} = R_dn x_0 + g_dn``.
    """
    a = 0.5j * prob.r
    R = 0j
    g = 0j
    for m in range(prob.depth, 0, -1):
        d, f = ladder_coefficients(prob, m)
        den = d - a * R
        R = -a / den
        g = (f + a * g) / den
    R_up, g_up = R, g
    R = 0j
    g = 0j
    for m in range(-prob.depth, 0):
        d, f = ladder_coefficients(prob, m)
        den = d + a * R
        R = a / den
        g = (f - a * g) / den
    return R_up, g_up, R, g


def minimal_ratio(prob: LadderProblem, direction: int, tol: float = 1e-13, max_depth: int = MAX_DEPTH) -> complex:
    """Ratio ``x_{+-1} / x_0`` of the minimal solution, by depth doubling."""
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    return _converged(prob, tol, max_depth)[0 if direction == 1 else 2]


def _converged(prob: LadderProblem, tol: float = 1e-13, max_depth: int = MAX_DEPTH):
    depth = prob.depth
    prev = _sweeps(prob.with_depth(depth))
    while True:
        if depth * 2 > max_depth:
            raise ConvergenceError(
                f"continued fractions not converged at depth {depth}: last iterates {prev[0]!r}, {prev[2]!r}",
                module="ladder",
                operation="minimal_ratio",
                params={"p": prob.base_p, "omega": prob.omega, "r": prob.r},
            )
        depth *= 2
        cur = _sweeps(prob.with_depth(depth))
        change = max(abs(c - p) for c, p in zip(cur, prev))
        scale = max(1.0, max(abs(c) for c in cur))
        prev = cur
        if change <= tol * scale:
            return cur


def secular_function(prob: LadderProblem, tol: float = 1e-13, max_depth: int = MAX_DEPTH) -> complex:
    """S(p) at ``prob.base_p``; its zeros are the resonance poles of y."""
    R_up, _, R_dn, _ = _converged(prob, tol, max_depth)
    a = 0.5j * prob.r
    d0, _ = ladder_coefficients(prob, 0)
    return d0 - a * R_up + a * R_dn


def solve_inhomogeneous(prob: LadderProblem, tol: float = 1e-13) -> np.ndarray:
    """``y(base_p + i m omega)`` for ``|m| <= prob.depth`` (index m + depth).

    Uses a fixed depth (no doubling) so that every rung is returned.
    """
    a = 0.5j * prob.r
    n = prob.depth
    D = np.empty(2 * n + 1, dtype=complex)
    F = np.empty(2 * n + 1, dtype=complex)
    for m in range(-n, n + 1):
        D[m + n], F[m + n] = ladder_coefficients(prob, m)
    R = np.zeros(2 * n + 2, dtype=complex)
    G = np.zeros(2 * n + 2, dtype=complex)
    # upward rows: x_m = R[m] x_{m-1} + G[m]
    Rn, Gn = 0j, 0j
    for m in range(n, 0, -1):
        den = D[m + n] - a * Rn
        Rn = -a / den
        Gn = (F[m + n] + a * Gn) / den
        R[m + n], G[m + n] = Rn, Gn
    Rn, Gn = 0j, 0j
    for m in range(-n, 0):
        den = D[m + n] + a * Rn
        Rn = a / den
        Gn = (F[m + n] - a * Gn) / den
        R[m + n], G[m + n] = Rn, Gn
    s0 = D[n] - a * R[n + 1] + a * R[n - 1]
    x = np.zeros(2 * n + 1, dtype=complex)
    x[n] = (F[n] + a * G[n + 1] - a * G[n - 1]) / s0
    for m in range(1, n + 1):
        x[m + n] = R[m + n] * x[m - 1 + n] + G[m + n]
    for m in range(-1, -n - 1, -1):
        x[m + n] = R[m + n] * x[m + 1 + n] + G[m + n]
    return D * x


@dataclass
class PoleResult:
    """A located resonance pole and what follows from it."""

    p_star: complex
    gamma_rate: float
    stark_shift: float
    residue_amp: complex
    newton_iters: int
    secular_residual: float
    omega: float = math.nan
    r: float = math.nan
    flag: str = "ok"
    harmonics: dict[int, complex] = field(default_factory=dict)

    @property
    def inv_gamma(self) -> float:
        return math.inf if self.gamma_rate <= 0 else 1.0 / self.gamma_rate

    @property
    def mean_amplitude(self) -> complex:
        """Time-average coefficient of the pole part of theta."""
        return self.harmonics.get(0, complex("nan"))

    @property
    def cycle_mean_weight(self) -> float:
        """Sum of |c_m|^2: the period-averaged survival of the pole part at t = 0."""
        if not self.harmonics:
            return math.nan
        return float(sum(abs(c) ** 2 for c in self.harmonics.values()))


def leading_order_pole(omega: float, r: float) -> complex:
    """Small-r pole estimate: ``p ~ (i r^2 / 2)(1/D(i w) + 1/D(-i w)) - Gamma/2``."""
    eps = 1e-9
    p0 = 0.5j * r * r * (1.0 / denominator(eps + 1j * omega) + 1.0 / denominator(eps - 1j * omega))
    gamma = gamma_staircase(omega, r).gamma
    return complex(min(p0.real, -0.5 * gamma), p0.imag)


def find_decay_pole(
    omega: float,
    r: float,
    p_guess: complex | None = None,
    *,
    tol: float = 1e-10,
    max_iter: int = 50,
    residue: bool = True,
    n_harmonics: int = 3,
    max_depth: int = MAX_DEPTH,
) -> PoleResult:
    """Damped Newton iteration on the secular function.

    The derivative is a central difference with step ``1e-7 max(1, |p|)``;
    a step that increases |S| is halved up to 30 times.  Iteration stops
    when the Newton correction reaches round-off; ``tol`` bounds the final
    |S|.

    The result's ``flag`` is "ok", "resonance" (omega within 3 r^2 of an
    open channel threshold 1/j; the staircase law does not apply there) or
    "unresolved" (Gamma below 64 ulp of |p|, so only an upper bound).
    """
    if omega <= 0:
        raise DomainError("omega must be positive")
    if r < 0:
        raise DomainError("r must be non-negative")
    flag = "resonance" if near_resonance(omega, r) else "ok"
    if r == 0:
        return PoleResult(0j, 0.0, 0.0, 0j, 0, 0.0, omega, r, flag, {0: 1.0 + 0j})
    p = leading_order_pole(omega, r) if p_guess is None else complex(p_guess)

    def S(pp: complex) -> complex:
        return secular_function(LadderProblem(pp, omega, r), max_depth=max_depth)

    trail = [p]
    val = S(p)
    iters = 0
    for iters in range(1, max_iter + 1):
        dstep = 1e-7 * max(1.0, abs(p))
        deriv = (S(p + dstep) - S(p - dstep)) / (2 * dstep)
        if deriv == 0:
            break
        delta = -val / deriv
        lam = 1.0
        for _ in range(30):
            cand = p + lam * delta
            try:
                cval = S(cand)
            except NumericalFailure:
                cval = complex("inf")
            if abs(cval) <= abs(val) or abs(cval) < 1e-300:
                break
            lam *= 0.5
        else:
            break
        p, val = cand, cval
        trail.append(p)
        if abs(lam * delta) <= 4e-16 * max(abs(p), 1e-300) or val == 0:
            break
    residual = abs(val)
    if not (residual < tol) or not math.isfinite(residual):
        if flag == "resonance":
            return PoleResult(p, -2.0 * p.real, p.imag, complex("nan"), iters, residual, omega, r, "resonance")
        raise ConvergenceError(
            f"Newton iteration diverged; last iterates {trail[-3:]!r}",
            module="ladder",
            operation="find_decay_pole",
            params={"omega": omega, "r": r},
        )
    gamma = -2.0 * p.real
    if gamma < GAMMA_RESOLUTION * max(1.0, abs(p)) and flag == "ok":
        # Re p is below what the secular function resolves in double precision
        flag = "unresolved"
    harmonics: dict[int, complex] = {}
    res0 = complex("nan")
    if residue:
        res = pole_residues(p, omega, r, n_harmonics)
        res0 = res[0]
        harmonics = {m: 2j * res[m] / (p + 1j * m * omega) for m in res}
    return PoleResult(p, gamma, p.imag, res0, iters, residual, omega, r, flag, harmonics)


def pole_residues(p_star: complex, omega: float, r: float, n_harmonics: int = 3) -> dict[int, complex]:
    """Residues of y at ``p_star + i m omega`` for ``|m| <= n_harmonics``.

    ``1 / y_m(p)`` is sampled on four probe points around ``p_star`` and fitted
    linearly; the residue is the inverse slope.
    """
    scale = max(abs(p_star.real), 1e-12 * max(1.0, abs(p_star)))
    rad = min(1e-3 * max(abs(p_star), 1e-8), max(scale, 1e-9))
    probes = [p_star + rad * cmath.exp(1j * (math.pi / 4 + k * math.pi / 2)) for k in range(4)]
    depth = max(START_DEPTH, 2 * n_harmonics + 8)
    samples = [solve_inhomogeneous(LadderProblem(q, omega, r, depth)) for q in probes]
    out = {}
    for m in range(-n_harmonics, n_harmonics + 1):
        inv = np.array([1.0 / s[m + depth] for s in samples])
        dz = np.array(probes) - p_star
        A = np.vstack([dz, np.ones(4)]).T
        slope = np.linalg.lstsq(A, inv, rcond=None)[0][0]
        out[m] = 1.0 / slope
    return out


def gamma_vs_omega_scan(
    omegas,
    r: float,
    continuation: bool = True,
    chunk: int = 0,
    tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
) -> list[PoleResult]:
    """Track the decay pole over a sorted frequency grid.

    With ``continuation`` each point seeds Newton from the previous pole,
    except across a photon-order boundary ``omega = 1/n`` where the guess
    is rebuilt from the small-r asymptotics.  ``chunk > 0`` restarts the
    chain every ``chunk`` points so chunks can run independently.  Failed
    points are kept with ``flag="failed"``.
    """
    omegas = [float(w) for w in omegas]
    if any(b < a for a, b in zip(omegas, omegas[1:])):
        raise DomainError("omegas must be sorted")
    if r < 0:
        raise DomainError("r must be non-negative")
    out: list[PoleResult] = []
    prev: PoleResult | None = None
    for i, w in enumerate(omegas):
        guess = None
        if continuation and prev is not None and prev.flag != "failed" and not (chunk and i % chunk == 0):
            if math.ceil(1.0 / w) == math.ceil(1.0 / prev.omega):
                guess = prev.p_star
        try:
            res = find_decay_pole(w, r, guess, tol=tol, residue=False, max_depth=max_depth)
        except (ConvergenceError, NumericalFailure):
            res = PoleResult(complex("nan"), math.nan, math.nan, complex("nan"), 0, math.inf, w, r, "failed")
        out.append(res)
        prev = res
    return out
