import math

import numpy as np
import pytest

from deltaion._hotloops import _spectrum_numba, _spectrum_numpy
from deltaion.errors import DomainError
from deltaion.model import BoundState, DriveSpec, eval_eta
from deltaion.spectrum import (
    MomentumSpectrum,
    compute_spectra,
    compute_spectrum,
    default_k_grid,
    ionized_fraction,
    reconstruct_wavefunction,
    unitarity_defects,
)
from deltaion.volterra import SolverConfig, solve_Y


@pytest.fixture(scope="module")
def traj():
    return solve_Y(DriveSpec.single(1.5, 0.3), SolverConfig(h=0.005, t_max=20.3))


def test_initial_spectrum_vanishes(traj):
    sp = compute_spectrum(traj, t_snapshot=0.0)
    assert np.all(sp.Theta == 0)


def test_filon_matches_fine_trapezoid(traj):
    t = 10.0
    j = traj.index_of(t)
    k = np.array([0.0, 0.4, 1.3, 3.0])
    sp = compute_spectrum(traj, k_grid=k, t_snapshot=t)
    # refine the linear interpolant of Y 20x and integrate by trapezoid
    fine_t = np.linspace(0, t, 20 * j + 1)
    y = np.interp(fine_t, traj.times[: j + 1], traj.Y[: j + 1].real) + 1j * np.interp(
        fine_t, traj.times[: j + 1], traj.Y[: j + 1].imag
    )
    for kk, val in zip(k, sp.Theta):
        pref = 2 * abs(kk) / (math.sqrt(2 * math.pi) * (1 - 1j * abs(kk)))
        ref = pref * np.trapezoid(y * np.exp(1j * (1 + kk * kk) * fine_t), fine_t)
        assert abs(val - ref) < 1e-6


def test_backends_agree(traj):
    kappa = 1.0 + np.linspace(0, 4, 37) ** 2
    idx = np.array([10, 1000, 4060], dtype=np.int64)
    a = _spectrum_numba(traj.Y, traj.h, kappa, idx)
    b = _spectrum_numpy(traj.Y, traj.h, kappa, idx)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


def test_unitarity_at_default_step(traj):
    _, defects = unitarity_defects(traj, n_checkpoints=5)
    assert np.max(np.abs(defects)) < 1e-4


def test_unitarity_multi_harmonic():
    drive = DriveSpec(1.0, ((0.3, 0.0), (0.0, 0.2)))
    tr = solve_Y(drive, SolverConfig(h=0.005, t_max=30.0))
    _, defects = unitarity_defects(tr, n_checkpoints=6)
    assert np.max(np.abs(defects)) < 1e-4


def test_norm_drift_shrinks_with_step():
    drive = DriveSpec.single(2.0, 0.2)
    d = []
    for h in (0.04, 0.02):
        tr = solve_Y(drive, SolverConfig(h=h, t_max=40.0))
        d.append(abs(unitarity_defects(tr, times=[40.0])[1][0]))
    assert 3.0 < d[0] / d[1] < 5.0  # second order in h


def test_snapshot_checks(traj):
    with pytest.raises(DomainError):
        compute_spectrum(traj, t_snapshot=traj.t_max + 1.0)
    with pytest.raises(DomainError):
        compute_spectrum(traj, drive=DriveSpec.single(1.0, 0.3))
    with pytest.raises(DomainError):
        compute_spectra(traj, [0.0012345])


def test_shared_grid_for_several_snapshots(traj):
    a, b = compute_spectra(traj, [5.0, 20.0])
    assert np.array_equal(a.k_grid, b.k_grid)
    single = compute_spectrum(traj, k_grid=a.k_grid, t_snapshot=5.0)
    np.testing.assert_allclose(single.Theta, a.Theta, rtol=1e-12, atol=1e-15)


def test_default_grid_integrates_lorentzian_tail():
    k, w = default_k_grid(DriveSpec.single(2.0, 0.1), 50.0)
    assert np.all(np.diff(k) > 0)
    assert np.sum(w / (1 + k * k) ** 2) == pytest.approx(math.pi / 4, rel=1e-10)


def test_truncated_grid_warns():
    k = np.linspace(0, 2, 50)
    sp = MomentumSpectrum(k, np.ones_like(k, dtype=complex), 1.0)
    with pytest.warns(RuntimeWarning):
        ionized_fraction(sp)


def test_wavefunction_at_origin_matches_time_domain(traj):
    drive = traj.drive
    for t in (10.3, 20.3):
        sp = compute_spectrum(traj, t_snapshot=t)
        psi0 = reconstruct_wavefunction(traj, sp, [0.0], t)[0]
        j = traj.index_of(t)
        assert abs(psi0 * np.exp(-1j * t) - traj.Y[j] / eval_eta(drive, t)) < 2e-4


def test_wavefunction_initial_state(traj):
    sp = compute_spectrum(traj, t_snapshot=0.0)
    y = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(reconstruct_wavefunction(traj, sp, y), BoundState()(y), atol=1e-14)
