import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltaion.asymptotics import gamma_staircase
from deltaion.errors import ConvergenceError, DomainError, NumericalFailure
from deltaion.ladder import (
    LadderProblem,
    denominator,
    find_decay_pole,
    gamma_vs_omega_scan,
    ladder_coefficients,
    minimal_ratio,
    secular_function,
    solve_inhomogeneous,
)

# two-photon rate at omega = 0.75, r = 0.05 by direct substitution:
# sqrt(0.5) / (1 - sqrt(0.25))^2 * 0.05^4 / 6
GAMMA_075_005 = 2.946278254943948e-06


def test_golden_constant_by_arithmetic():
    assert GAMMA_075_005 == pytest.approx(math.sqrt(0.5) / 0.25 * 0.05**4 / 6.0, rel=1e-15)


def test_row_coefficients():
    d0, f0 = ladder_coefficients(LadderProblem(1.0, 3.0, 0.2), 0)
    assert d0 == pytest.approx(cmath.sqrt(1 - 1j) - 1, abs=1e-15)
    _, f0 = ladder_coefficients(LadderProblem(0.1, 2.0, 0.3), 0)
    assert f0 == pytest.approx(2 * 0.3 / 4.01, rel=1e-14)
    with pytest.raises(DomainError):
        ladder_coefficients(LadderProblem(0.1, 2.0, 0.3, depth=8), 9)


def test_problem_validation():
    with pytest.raises(DomainError):
        LadderProblem(0.1, 0.0, 0.1)
    with pytest.raises(DomainError):
        LadderProblem(0.1, 1.0, -0.1)
    with pytest.raises(DomainError):
        LadderProblem(0.1, 1.0, 0.1, depth=4)


@given(st.floats(1.01, 5.0), st.floats(1e-6, 0.5), st.floats(-0.5, 0.5))
def test_branch_above_threshold(omega, re_p, im_p):
    # sqrt(1 - i p - omega) = -i sqrt(omega - 1 + i p) for small p with Re p > 0
    p = complex(re_p, im_p)
    lhs = denominator(p - 1j * omega) + 1.0
    rhs = -1j * cmath.sqrt(omega - 1 + 1j * p)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


@given(st.floats(1e-6, 10.0), st.floats(-10.0, 10.0))
def test_branch_is_principal_in_right_half_plane(a, b):
    q = complex(a, b)
    assert abs(denominator(q) + 1.0 - cmath.sqrt(1 - 1j * q)) < 1e-12 * max(1.0, abs(q)) ** 0.5


def test_branch_point_rejected():
    with pytest.raises(NumericalFailure):
        denominator(-1j)


def test_ratio_vanishes_without_coupling():
    prob = LadderProblem(0.3 + 0.1j, 1.5, 0.0)
    assert minimal_ratio(prob, 1) == 0 and minimal_ratio(prob, -1) == 0
    assert secular_function(prob) == ladder_coefficients(prob, 0)[0]


@pytest.mark.parametrize("direction", [1, -1])
def test_ratio_is_linear_in_r(direction):
    a = minimal_ratio(LadderProblem(0.2 + 0.1j, 1.5, 0.02), direction)
    b = minimal_ratio(LadderProblem(0.2 + 0.1j, 1.5, 0.01), direction)
    assert a / b == pytest.approx(2.0, rel=1e-3)


def test_ratio_stable_under_depth_doubling():
    prob = LadderProblem(0.05 + 0.02j, 0.8, 0.3)
    base = minimal_ratio(prob, 1)
    deep = minimal_ratio(prob.with_depth(1024), 1)
    assert abs(base - deep) < 1e-13


def test_depth_cap_reports_iterates():
    with pytest.raises(ConvergenceError, match="last iterates"):
        minimal_ratio(LadderProblem(0.1, 1.5, 0.3), 1, max_depth=32)
    with pytest.raises(DomainError):
        minimal_ratio(LadderProblem(0.1, 1.5, 0.3), 0)


def test_unperturbed_zero_at_origin():
    assert abs(secular_function(LadderProblem(1e-13, 2.0, 0.0))) < 1e-12


def test_one_photon_pole():
    res = find_decay_pole(2.0, 0.1)
    assert res.gamma_rate == pytest.approx(0.005, rel=0.05)
    assert res.secular_residual < 1e-10
    assert res.flag == "ok"


def test_two_photon_pole():
    res = find_decay_pole(0.75, 0.05)
    assert res.gamma_rate == pytest.approx(GAMMA_075_005, rel=0.10)


def test_simple_zero_by_winding_number():
    res = find_decay_pole(2.0, 0.1, residue=False)
    rad = 1e-3
    pts = [res.p_star + rad * cmath.exp(2j * math.pi * k / 64) for k in range(65)]
    vals = [secular_function(LadderProblem(p, 2.0, 0.1)) for p in pts]
    turns = sum(cmath.phase(b / a) for a, b in zip(vals, vals[1:])) / (2 * math.pi)
    assert round(turns) == 1


def test_weak_drive_limit():
    res = find_decay_pole(1.5, 1e-4)
    assert abs(res.p_star) < 1e-6
    assert 0 < res.gamma_rate < 1e-7


@pytest.mark.parametrize("m", [1, -1, 2])
def test_strip_shift_covariance(m):
    omega = 1.5
    base = find_decay_pole(omega, 0.2, residue=False)
    shifted = find_decay_pole(omega, 0.2, base.p_star + 1j * m * omega + 1e-4, residue=False)
    assert abs(shifted.p_star.real - base.p_star.real) < 1e-10
    assert abs(shifted.p_star.imag - base.p_star.imag - m * omega) < 1e-10


def test_newton_failure_carries_trail():
    with pytest.raises(ConvergenceError, match="iterates"):
        find_decay_pole(2.0, 0.1, 0.5 + 0.5j, max_iter=1)


def test_zero_amplitude_pole():
    res = find_decay_pole(2.0, 0.0)
    assert res.p_star == 0 and res.gamma_rate == 0


def test_resonance_flag():
    res = find_decay_pole(1.0 + 0.1**2 / math.sqrt(2), 0.1, residue=False)
    assert res.flag == "resonance"


def test_source_decay_along_ladder():
    y = solve_inhomogeneous(LadderProblem(0.2, 1.2, 0.05, depth=32))
    assert abs(y[32 + 16]) < abs(y[32]) and abs(y[32 - 16]) < abs(y[32])


def test_total_ionization_identity():
    # int_0^inf Y dt = y(0+) = (theta(inf) - 1) / 2i = i/2
    for omega, r in ((2.0, 0.1), (0.75, 0.1)):
        y = solve_inhomogeneous(LadderProblem(1e-8, omega, r, depth=64))
        assert abs(y[64] - 0.5j) < 1e-5


def test_harmonic_amplitudes_scale_as_powers_of_r():
    a = find_decay_pole(2.0, 0.05).harmonics
    b = find_decay_pole(2.0, 0.025).harmonics
    assert abs(a[0]) == pytest.approx(1.0, abs=1e-3)
    for m in (1, -1, 2, -2, 3, -3):
        ratio = abs(a[m]) / abs(b[m])
        assert ratio == pytest.approx(2.0 ** abs(m), rel=0.1)
        # the amplitudes fall off along the ladder
        assert abs(a[m]) < abs(a[m - 1 if m > 0 else m + 1])


def test_residue_matches_time_domain_intercept():
    from deltaion.model import DriveSpec
    from deltaion.volterra import SolverConfig, fit_decay_rate, solve_Y

    # the period average of |sum_m c_m e^{i m omega t}|^2 is sum_m |c_m|^2
    res = find_decay_pole(1.5, 0.2, n_harmonics=5)
    fit = fit_decay_rate(solve_Y(DriveSpec.single(1.5, 0.2), SolverConfig(h=0.02, t_max=200.0)), 40.0)
    assert math.exp(fit.intercept) == pytest.approx(res.cycle_mean_weight, rel=1e-3)


def test_scan_against_staircase():
    omegas = np.linspace(1.1, 2.0, 10)
    res = gamma_vs_omega_scan(omegas, 0.01)
    for x in res:
        assert x.gamma_rate == pytest.approx(gamma_staircase(x.omega, 0.01).gamma, rel=0.05)


def test_scan_records_failures_and_continues():
    res = gamma_vs_omega_scan([0.9, 1.0, 1.1], 0.05)
    assert len(res) == 3
    assert all(x.flag in ("ok", "resonance", "failed") for x in res)
    with pytest.raises(DomainError):
        gamma_vs_omega_scan([1.2, 1.1], 0.05)


def test_rate_jumps_across_one_photon_threshold():
    below, above = gamma_vs_omega_scan([0.9, 1.1], 0.01)
    assert above.gamma_rate / below.gamma_rate > 1e2


def test_scan_chunks_match_full_chain():
    omegas = np.linspace(1.2, 1.8, 8)
    full = gamma_vs_omega_scan(omegas, 0.1)
    chunked = gamma_vs_omega_scan(omegas, 0.1, chunk=3)
    for a, b in zip(full, chunked):
        assert abs(a.p_star - b.p_star) < 1e-12
