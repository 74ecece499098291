import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltaion._hotloops import _march_numba, _march_numpy, volterra_march
from deltaion.errors import DomainError, NumericalFailure, SolverInstability
from deltaion.kernel import DEFAULT_KERNEL
from deltaion.model import DriveSpec, eval_eta
from deltaion.volterra import (
    SolverConfig,
    Trajectory,
    convergence_order_study,
    convolution_weights,
    cycle_average,
    fit_decay_rate,
    integrate_theta,
    solve_Y,
)


def test_config_defaults_and_validation():
    cfg = SolverConfig()
    assert cfg.h == 0.005 and cfg.scheme_order == 2
    with pytest.raises(DomainError):
        SolverConfig(h=-0.1)
    with pytest.raises(DomainError):
        SolverConfig(h=0.1, t_max=0.01)
    with pytest.raises(DomainError):
        SolverConfig(scheme_order=3)
    with pytest.raises(DomainError):
        solve_Y(DriveSpec.single(5.0, 0.1), SolverConfig(h=0.05, t_max=1.0))


def test_zero_drive_keeps_bound_state():
    tr = solve_Y(DriveSpec.single(2.0, 0.0), SolverConfig(h=0.02, t_max=10.0))
    assert np.all(tr.Y == 0)
    assert np.all(tr.survival == 1.0)


@given(st.floats(0.3, 3.0), st.floats(0.0, 0.6))
def test_trajectory_invariants(omega, r):
    h = min(0.05, 0.1 / omega)
    tr = solve_Y(DriveSpec.single(omega, r), SolverConfig(h=h, t_max=20.0))
    assert tr.theta[0] == 1.0
    assert np.all(tr.survival <= 1.0 + 1e-6)
    assert np.all(tr.survival >= 0.0)
    assert tr.Y[0] == 0.0


def test_discrete_equation_residual():
    drive = DriveSpec(1.3, ((0.4, 0.1), (0.0, 0.2)))
    cfg = SolverConfig(h=0.05, t_max=6.0)
    tr = solve_Y(drive, cfg)
    n = cfg.n_steps
    w, w_end = convolution_weights(cfg.h, n)
    eta = eval_eta(drive, tr.times)
    for j in (1, 2, 17, n):
        conv = w[0] * tr.Y[j] + np.dot(w[1:j], tr.Y[j - 1 : 0 : -1]) + w_end[j] * tr.Y[0]
        assert abs(tr.Y[j] - eta[j] * (1 + conv)) < 1e-13


def test_weights_reproduce_exact_convolution_of_linear_data():
    # for Y(t) = t the trapezoid product rule is exact: int_0^T K(T-s) s ds
    h, n = 0.1, 40
    w, w_end = convolution_weights(h, n)
    T = n * h
    y = h * np.arange(n + 1)
    approx = w[0] * y[n] + np.dot(w[1:n], y[n - 1 : 0 : -1]) + w_end[n] * y[0]
    f1, f2 = DEFAULT_KERNEL.primitive(T)
    exact = T * f1[0] - f2[0] + 2j * T * T / 2
    assert abs(approx - exact) < 1e-12


def _static_survival(eta, h=0.02, n=15000):
    w, w_end = convolution_weights(h, n)
    y, _, status = volterra_march(np.full(n + 1, eta), w, w_end, complex(eta))
    assert status == 0
    return np.abs(integrate_theta(y, h)) ** 2


@pytest.mark.parametrize("eta", [0.2, -0.2])
def test_sudden_well_change_overlap(eta):
    # a constant eta is a sudden change of binding momentum to 1 + eta;
    # survival tends to the fourth power of the bound-state overlap
    kappa = 1.0 + eta
    limit = (4 * kappa / (1 + kappa) ** 2) ** 2
    s = _static_survival(eta)
    assert abs(s[-2500:].mean() - limit) < 2e-4


def test_backends_agree():
    rng = np.random.default_rng(7)
    n = 300
    eta = 0.3 * np.sin(0.9 * 0.05 * np.arange(n + 1))
    w, w_end = convolution_weights(0.05, n)
    a = _march_numba(eta, w, w_end, 0j)
    b = _march_numpy(eta, w, w_end, 0j)
    assert a[1:] == b[1:]
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-15)
    _ = rng


def test_instability_reported(monkeypatch):
    eta = np.full(50, 5e10)
    w = np.zeros(50, dtype=complex)
    w_end = np.zeros(50, dtype=complex)
    _, stop, status = volterra_march(eta, w, w_end, 0j)
    assert status == 2 and stop == 1
    import deltaion.volterra as vol

    monkeypatch.setattr(vol, "volterra_march", lambda *a: (np.zeros(len(a[0]), complex), 7, 2))
    with pytest.raises(SolverInstability, match="node"):
        vol.solve_Y(DriveSpec.single(1.0, 0.1), SolverConfig(h=0.05, t_max=1.0))


def test_singular_self_coupling_reported(monkeypatch):
    import deltaion.volterra as vol

    monkeypatch.setattr(vol, "volterra_march", lambda *a: (np.zeros(len(a[0]), complex), 3, 1))
    with pytest.raises(NumericalFailure, match="singular"):
        vol.solve_Y(DriveSpec.single(1.0, 0.1), SolverConfig(h=0.05, t_max=1.0))


def test_trapezoid_order():
    study = convergence_order_study(DriveSpec.single(2.0, 0.1), SolverConfig(h=0.04, t_max=10.0), refinements=4)
    assert study.status == "ok"
    assert study.order >= 1.8
    assert study.passed


def test_rectangle_order_is_one():
    study = convergence_order_study(
        DriveSpec.single(2.0, 0.1), SolverConfig(h=0.04, t_max=10.0, scheme_order=1), refinements=4
    )
    assert 0.8 < study.order < 1.3


def test_order_study_degenerate_cases():
    zero = convergence_order_study(DriveSpec.single(2.0, 0.0), SolverConfig(h=0.04, t_max=2.0))
    assert zero.status == "exact" and zero.passed
    with pytest.raises(DomainError):
        convergence_order_study(DriveSpec.single(2.0, 0.1), SolverConfig(h=0.04, t_max=2.0), refinements=2)


def _synthetic(values, omega=1.0, h=0.01):
    t = h * np.arange(len(values))
    traj = Trajectory(t, np.zeros(len(t), complex), np.sqrt(values).astype(complex), DriveSpec.single(omega, 0.1), SolverConfig(h=h, t_max=t[-1]))
    return traj


def test_cycle_average_removes_drive_oscillation():
    h = 0.01
    t = h * np.arange(5001)
    vals = 0.5 + 0.1 * np.sin(2.0 * t)
    traj = _synthetic(vals, omega=2.0, h=h)
    tm, avg = cycle_average(traj)
    np.testing.assert_allclose(avg, 0.5, atol=2e-5)
    assert tm[0] == pytest.approx(math.pi / 2, abs=h)


def test_rate_fit_on_exact_exponential():
    h = 0.01
    t = h * np.arange(20001)
    traj = _synthetic(0.9 * np.exp(-0.01 * t) * (1 + 0.05 * np.cos(t)) ** 2)
    fit = fit_decay_rate(traj, 20.0)
    assert fit.gamma == pytest.approx(0.01, rel=2e-3)
    assert fit.r_squared > 0.9999
    with pytest.raises(DomainError):
        fit_decay_rate(traj, 199.0)
