"""Memory kernel of the bound-state integral equation.

The kernel is

    M(s) = (2i/pi) int_0^inf u^2 exp(-i s (1 + u^2)) / (1 + u^2) du,   s > 0.

Writing z = exp(i pi/4) sqrt(s) it reduces to

    M(s) = exp(i pi/4) exp(-i s) / sqrt(pi s) - i erfc(z),

which is evaluated with the Taylor series of erf for small s and with the
Laplace continued fraction of erfc for large s.  The large-s branch is
rearranged so the two O(s^-1/2) terms cancel analytically, leaving the
O(s^-3/2) remainder free of round-off.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError

SQRT_PI = math.sqrt(math.pi)
ROT = cmath.exp(0.25j * math.pi)  # principal sqrt(i)

# Gauss-Legendre rule on [0, 1] for smooth far-field cells.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _check_positive(s: np.ndarray) -> None:
    if np.any(~(s > 0)) or np.any(~np.isfinite(s)):
        raise DomainError("kernel argument must be finite and > 0")


def _erf_series(s: np.ndarray) -> np.ndarray:
    """erf(exp(i pi/4) sqrt(s)) by its Maclaurin series; fine for s <= ~3."""
    z = ROT * np.sqrt(s)
    mz2 = -1j * s  # -z**2
    term = z.copy()
    total = z.copy()
    n_terms = 48
    for n in range(1, n_terms):
        term = term * mz2 / n
        total = total + term / (2 * n + 1)
    return (2.0 / SQRT_PI) * total


def _cf_tail(s: np.ndarray) -> np.ndarray:
    """Tail T of sqrt(pi) e^{z^2} erfc(z) = 1 / (z + T), z = exp(i pi/4) sqrt(s).

    T = (1/2) / (z + 1 / (z + (3/2) / (z + 2 / (z + ...)))).
    """
    z = ROT * np.sqrt(s)
    depth = int(np.clip(40 + 320.0 / max(float(np.min(s)), 1e-300), 40, 400))
    tail = np.zeros_like(z)
    for k in range(depth, 0, -1):
        tail = (0.5 * k) / (z + tail)
    return tail


@dataclass(frozen=True)
class KernelEvaluator:
    """Evaluates M(s) to an absolute accuracy of about ``target_abs_tol``.

    Arguments up to ``crossover_s`` use the erf series, larger ones the
    continued fraction.  Both are accurate to ~1e-15 near the default
    crossover of 2.
    """

    crossover_s: float = 2.0
    target_abs_tol: float = 1e-12

    def __post_init__(self):
        if not (0.5 <= self.crossover_s <= 3.0):
            raise DomainError("crossover_s must lie in [0.5, 3] for both branches to hold accuracy")

    def small(self, s) -> np.ndarray:
        """Series branch (accurate for s <= ~3)."""
        s = np.asarray(s, dtype=float)
        return ROT * np.exp(-1j * s) / np.sqrt(math.pi * s) - 1j * (1.0 - _erf_series(s))

    def large(self, s) -> np.ndarray:
        """Continued-fraction branch (accurate for s >= ~1)."""
        s = np.asarray(s, dtype=float)
        z = ROT * np.sqrt(s)
        tail = _cf_tail(s)
        return np.exp(-1j * s) / SQRT_PI * (1j * tail / (z * (z + tail)))

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        _check_positive(s_arr)
        flat = np.atleast_1d(s_arr).ravel()
        out = np.empty(flat.shape, dtype=complex)
        lo = flat <= self.crossover_s
        if lo.any():
            out[lo] = self.small(flat[lo])
        if (~lo).any():
            out[~lo] = self.large(flat[~lo])
        return out.reshape(s_arr.shape) if s_arr.ndim else complex(out[0])

    def erf_rot(self, s) -> np.ndarray:
        """erf(exp(i pi/4) sqrt(s)) on either branch."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty(s.shape, dtype=complex)
        lo = s <= self.crossover_s
        if lo.any():
            out[lo] = _erf_series(s[lo])
        if (~lo).any():
            sh = s[~lo]
            z = ROT * np.sqrt(sh)
            erfc = np.exp(-1j * sh) / (SQRT_PI * (z + _cf_tail(sh)))
            out[~lo] = 1.0 - erfc
        return out

    def regular_part(self, s):
        """``M(s) - exp(i pi/4)/sqrt(pi s)``, finite as s -> 0+ (limit -i)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        _check_positive(s_arr)
        lo = s_arr <= self.crossover_s
        out = np.empty(s_arr.shape, dtype=complex)
        if lo.any():
            sl = s_arr[lo]
            # exp(-is) - 1 = -2i sin(s/2) exp(-is/2) avoids cancellation
            expm1 = -2j * np.sin(0.5 * sl) * np.exp(-0.5j * sl)
            out[lo] = ROT * expm1 / np.sqrt(math.pi * sl) - 1j * (1.0 - _erf_series(sl))
        if (~lo).any():
            sh = s_arr[~lo]
            out[~lo] = self(sh) - ROT / np.sqrt(math.pi * sh)
        return out if np.ndim(s) else complex(out[0])

    # ---- antiderivatives used by the product-integration weights ----

    def primitive(self, s):
        """Return ``(F1, F2)`` with F1 = int_0^s M, F2 = int_0^s u M(u) du."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out1 = np.zeros(s.shape, dtype=complex)
        out2 = np.zeros(s.shape, dtype=complex)
        pos = s > 0
        if pos.any():
            sp = s[pos]
            m = self(sp)
            erf = self.erf_rot(sp)
            c = ROT / (2.0 * SQRT_PI)
            out1[pos] = sp * m + 0.5 * erf
            out2[pos] = 0.5 * sp * sp * m + 0.5j * c * np.sqrt(sp) * np.exp(-1j * sp) - 0.125j * erf
        return out1, out2

    def cell_moments(self, h: float, n: int):
        """Moments of ``K(s) = 2i + M(s)`` over the cells ``[(m-1)h, mh]``.

        Returns arrays ``A[m-1] = int K ds`` and ``B[m-1] = int (s-(m-1)h) K ds``
        for ``m = 1..n``.  Cells below the crossover use the closed-form
        antiderivatives (they contain or sit near the s^-1/2 singularity);
        the rest use a 6-point Gauss-Legendre rule.
        """
        if h <= 0 or n < 1:
            raise DomainError("need h > 0 and n >= 1")
        m = np.arange(1, n + 1)
        A = np.empty(n, dtype=complex)
        B = np.empty(n, dtype=complex)
        n_near = int(min(n, math.floor(self.crossover_s / h)))
        if n_near > 0:
            edges = h * np.arange(0, n_near + 1)
            F1, F2 = self.primitive(edges)
            dF1 = np.diff(F1)
            dF2 = np.diff(F2)
            left = edges[:-1]
            A[:n_near] = dF1
            B[:n_near] = dF2 - left * dF1
        if n_near < n:
            mf = m[n_near:]
            left = (mf - 1) * h
            nodes = left[:, None] + h * _GL_X[None, :]
            vals = self(nodes)
            A[n_near:] = h * (vals @ _GL_W)
            B[n_near:] = h * h * (vals @ (_GL_W * _GL_X))
        A += 2j * h
        B += 1j * h * h
        return A, B


DEFAULT_KERNEL = KernelEvaluator()


def eval_M(s, evaluator: KernelEvaluator | None = None):
    """Memory kernel M(s) for s > 0 (scalar or array)."""
    return (evaluator or DEFAULT_KERNEL)(s)


def eval_M_oracle(s: float, tol: float = 1e-10, max_segments: int = 4000) -> complex:
    """Slow reference value of M(s) from the defining integral.

    The contour is rotated to ``u = exp(-i pi/4) v`` (no pole is crossed and
    the arc at infinity vanishes), which turns the oscillatory factor into
    the Gaussian ``exp(-s v^2)``.  The damped integrand is then summed
    segment by segment with adaptive Gauss-Kronrod until the remaining
    Gaussian tail is below ``tol``.
    """
    if not (s > 0 and math.isfinite(s)):
        raise DomainError("oracle argument must be finite and > 0")
    if tol <= 0:
        raise DomainError("tol must be positive")
    c = cmath.exp(-0.25j * math.pi)
    c2 = c * c  # -i

    def integrand(v: float) -> complex:
        u2 = c2 * v * v
        return c * u2 / (1.0 + u2) * math.exp(-s * v * v)

    seg = max(1.0, 1.0 / math.sqrt(s)) / 4.0
    total = 0j
    err_total = 0.0
    a = 0.0
    for _ in range(max_segments):
        b = a + seg
        with warnings.catch_warnings():
            # roundoff warnings at the requested epsabs are expected and the
            # error estimate is still accumulated below
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            re, e_re = integrate.quad(lambda v: integrand(v).real, a, b, epsabs=tol * 1e-3, epsrel=0, limit=200)
            im, e_im = integrate.quad(lambda v: integrand(v).imag, a, b, epsabs=tol * 1e-3, epsrel=0, limit=200)
        total += re + 1j * im
        err_total += e_re + e_im
        a = b
        # |integrand| <= exp(-s v^2); tail bound int_a^inf exp(-s v^2) dv
        tail = 0.5 * math.sqrt(math.pi / s) * math.erfc(math.sqrt(s) * a)
        if tail < tol * 1e-2:
            break
    else:
        raise ConvergenceError(
            f"oracle did not converge, error estimate {err_total + tail:.3e}",
            module="kernel",
            operation="eval_M_oracle",
            params={"s": s, "tol": tol},
        )
    prefactor = 2j / math.pi * cmath.exp(-1j * s)
    value = prefactor * total
    if abs(prefactor) * err_total > tol:
        raise ConvergenceError(
            f"oracle error estimate {abs(prefactor) * err_total:.3e} exceeds tol",
            module="kernel",
            operation="eval_M_oracle",
            params={"s": s, "tol": tol},
        )
    return value
