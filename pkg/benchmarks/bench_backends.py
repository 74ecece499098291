"""Time the numba and numpy hot loops on the same inputs.

Usage: python benchmarks/bench_backends.py [--steps N] [--kappas K] [--repeat R]

Both kernels are imported directly, so the DELTAION_BACKEND setting does
not matter here.  The first numba call is excluded (compilation).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from deltaion import DriveSpec, SolverConfig
from deltaion._accel import HAVE_NUMBA
from deltaion._hotloops import _march_numba, _march_numpy, _spectrum_numba, _spectrum_numpy
from deltaion.kernel import KernelEvaluator
from deltaion.model import eval_eta
from deltaion.volterra import convolution_weights


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--kappas", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    drive = DriveSpec.single(2.0, 0.1)
    h = 0.01
    cfg = SolverConfig(h=h, t_max=args.steps * h)
    times = h * np.arange(cfg.n_steps + 1)
    eta = np.asarray(eval_eta(drive, times), dtype=float)
    w, w_end = convolution_weights(h, cfg.n_steps, 2, KernelEvaluator())
    y0 = complex(eta[0])

    kappa = 1.0 + np.linspace(0.0, 6.0, args.kappas) ** 2
    checkpoints = np.linspace(0, cfg.n_steps, 11).round().astype(np.int64)[1:]

    rows = []
    t_np, (y_np, _, _) = best_of(lambda: _march_numpy(eta, w, w_end, y0), args.repeat)
    s_np_t, s_np = best_of(lambda: _spectrum_numpy(y_np, h, kappa, checkpoints), args.repeat)
    rows.append(("numpy", t_np, s_np_t))
    if HAVE_NUMBA:
        _march_numba(eta[:8], w[:8], w_end[:8], y0)
        _spectrum_numba(y_np[:8], h, kappa[:2], np.array([7], dtype=np.int64))
        t_nb, (y_nb, _, _) = best_of(lambda: _march_numba(eta, w, w_end, y0), args.repeat)
        s_nb_t, s_nb = best_of(lambda: _spectrum_numba(y_np, h, kappa, checkpoints), args.repeat)
        rows.append(("numba", t_nb, s_nb_t))
        march_diff = float(np.max(np.abs(y_nb - y_np)))
        spec_diff = float(np.max(np.abs(s_nb - s_np)))
    print(f"steps={cfg.n_steps} kappas={args.kappas} repeat={args.repeat}")
    print(f"{'backend':8s} {'march [s]':>10s} {'spectrum [s]':>13s}")
    for name, tm, ts in rows:
        print(f"{name:8s} {tm:10.3f} {ts:13.3f}")
    if HAVE_NUMBA:
        print(f"speedup  {t_np / t_nb:10.1f}x {s_np_t / s_nb_t:12.1f}x")
        print(f"max |difference|: march {march_diff:.1e}, spectrum {spec_diff:.1e}")
    else:
        print("numba not importable; only the numpy backend was timed")


if __name__ == "__main__":
    main()
