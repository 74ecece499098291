"""O(N^2) and O(N*K) inner loops, compiled with numba when available.

Each kernel has a pure-numpy twin with the same signature; the public
names at the bottom pick one according to ``deltaion._accel.BACKEND``.
"""

from __future__ import annotations

import numpy as np

from ._accel import BACKEND, njit

OVERFLOW = 1e10


@njit
def _march_numba(eta, w, w_end, y0):
    n_pts = eta.shape[0]
    y = np.zeros(n_pts, dtype=np.complex128)
    y[0] = y0
    w0 = w[0]
    for n in range(1, n_pts):
        acc = w_end[n] * y[0]
        for k in range(1, n):
            acc += w[k] * y[n - k]
        en = eta[n]
        denom = 1.0 - en * w0
        if abs(denom) < 1e-14:
            return y, n, 1
        yn = en * (1.0 + acc) / denom
        if abs(yn) > OVERFLOW:
            return y, n, 2
        y[n] = yn
    return y, n_pts, 0


def _march_numpy(eta, w, w_end, y0):
    n_pts = eta.shape[0]
    y = np.zeros(n_pts, dtype=np.complex128)
    y[0] = y0
    w0 = w[0]
    for n in range(1, n_pts):
        # sum_{k=1}^{n-1} w[k] y[n-k]
        acc = w_end[n] * y[0] + np.dot(w[1:n], y[n - 1 : 0 : -1])
        en = eta[n]
        denom = 1.0 - en * w0
        if abs(denom) < 1e-14:
            return y, n, 1
        yn = en * (1.0 + acc) / denom
        if abs(yn) > OVERFLOW:
            return y, n, 2
        y[n] = yn
    return y, n_pts, 0


@njit
def _spectrum_numba(y, h, kappa, checkpoints):
    """Running Filon sums of y against exp(i kappa t) for each kappa.

    Returns ``out[c, i] = int_0^{t_c} Y_lin(s) exp(i kappa_i s) ds`` for the
    piecewise-linear interpolant of ``y`` and ``t_c = checkpoints[c] * h``.
    """
    n_k = kappa.shape[0]
    n_c = checkpoints.shape[0]
    out = np.zeros((n_c, n_k), dtype=np.complex128)
    n_last = checkpoints[n_c - 1] if n_c > 0 else 0
    for i in range(n_k):
        kap = kappa[i]
        th = kap * h
        alpha, beta = _filon_weights(kap, h)
        step = np.exp(1j * th)
        back = np.exp(-1j * th)
        phase = 1.0 + 0.0j
        s = y[0]
        c = 0
        while c < n_c and checkpoints[c] == 0:
            c += 1
        for j in range(1, n_last + 1):
            if j % 512 == 0:
                phase = np.exp(1j * kap * (j * h))
            else:
                phase = phase * step
            s += phase * y[j]
            while c < n_c and checkpoints[c] == j:
                out[c, i] = alpha * (s - phase * y[j]) + beta * back * (s - y[0])
                c += 1
    return out


def _spectrum_numpy(y, h, kappa, checkpoints):
    n_c = checkpoints.shape[0]
    out = np.zeros((n_c, kappa.shape[0]), dtype=np.complex128)
    if n_c == 0:
        return out
    n_last = int(checkpoints[-1])
    alpha, beta = _filon_weights_vec(kappa, h)
    back = np.exp(-1j * kappa * h)
    s = np.full(kappa.shape, y[0], dtype=np.complex128)
    chunk = 256
    start = 1
    c = int(np.searchsorted(checkpoints, 0, side="right"))
    while start <= n_last:
        stop = min(n_last, start + chunk - 1)
        j = np.arange(start, stop + 1)
        ph = np.exp(1j * np.outer(j * h, kappa))  # (chunk, n_k)
        contrib = ph * y[start : stop + 1, None]
        csum = s[None, :] + np.cumsum(contrib, axis=0)
        while c < n_c and checkpoints[c] <= stop:
            row = int(checkpoints[c]) - start
            sc = csum[row]
            out[c] = alpha * (sc - ph[row] * y[checkpoints[c]]) + beta * back * (sc - y[0])
            c += 1
        s = csum[-1]
        start = stop + 1
    return out


@njit
def _filon_weights(kap, h):
    th = kap * h
    if abs(th) < 1e-2:
        # series of int_0^h (x/h) e^{i kap x} dx and int_0^h e^{i kap x} dx
        it = 1j * th
        beta = h * (0.5 + it / 3.0 + it * it / 8.0 + it**3 / 30.0 + it**4 / 144.0)
        full = h * (1.0 + it / 2.0 + it * it / 6.0 + it**3 / 24.0 + it**4 / 120.0)
    else:
        em1 = 2j * np.sin(0.5 * th) * np.exp(0.5j * th)  # e^{i th} - 1
        full = em1 / (1j * kap)
        beta = np.exp(1j * th) / (1j * kap) + em1 / (kap * kap * h)
    return full - beta, beta


def _filon_weights_vec(kappa, h):
    th = kappa * h
    it = 1j * th
    em1 = 2j * np.sin(0.5 * th) * np.exp(0.5j * th)
    with np.errstate(divide="ignore", invalid="ignore"):
        full = np.where(np.abs(th) < 1e-2, h * (1.0 + it / 2 + it**2 / 6 + it**3 / 24 + it**4 / 120), em1 / (1j * kappa))
        beta = np.where(
            np.abs(th) < 1e-2,
            h * (0.5 + it / 3 + it**2 / 8 + it**3 / 30 + it**4 / 144),
            np.exp(1j * th) / (1j * kappa) + em1 / (kappa * kappa * h),
        )
    return full - beta, beta


if BACKEND == "numba":
    volterra_march = _march_numba
    filon_sums = _spectrum_numba
else:
    volterra_march = _march_numpy
    filon_sums = _spectrum_numpy

filon_weights = _filon_weights_vec
