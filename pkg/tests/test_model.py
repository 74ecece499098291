import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltaion.errors import DomainError
from deltaion.model import (
    UNITS,
    BoundState,
    ContinuumState,
    DriveSpec,
    bound_continuum_coupling,
    channel_momenta,
    eval_eta,
    photon_order,
)

finite = st.floats(-5, 5, allow_nan=False)
harmonics = st.lists(st.tuples(finite, finite), min_size=1, max_size=4)
omegas = st.floats(0.05, 10.0)


def test_units_are_all_one():
    assert (UNITS.p0, UNITS.omega0, UNITS.hbar, UNITS.two_m, UNITS.half_g) == (1, 1, 1, 1, 1)


def test_eta_examples():
    assert eval_eta(DriveSpec.single(1.0, 0.5), 0.0) == 0.0
    assert eval_eta(DriveSpec.single(2.0, 1.0), math.pi / 4) == pytest.approx(1.0, abs=1e-15)
    three = DriveSpec(1.0, ((1.0, 0.0), (0.0, 1.0)))
    assert eval_eta(three, math.pi) == pytest.approx(1.0, abs=1e-14)


@given(omegas, harmonics, st.floats(-100, 100))
def test_eta_is_periodic(omega, harm, t):
    spec = DriveSpec(omega, tuple(harm))
    assert abs(eval_eta(spec, t) - eval_eta(spec, t + spec.period)) < 1e-12 * max(1.0, abs(t) * omega) * 10


@given(omegas, harmonics)
def test_drive_json_round_trip(omega, harm):
    spec = DriveSpec(omega, tuple(harm))
    back = DriveSpec.from_json(spec.to_json())
    assert back == spec
    doc = json.loads(spec.to_json())
    assert [e["j"] for e in doc["harmonics"]] == list(range(1, len(harm) + 1))


def test_single_harmonic_flag():
    assert DriveSpec.single(1.0, 0.3).is_single_harmonic()
    assert DriveSpec.single(1.0, 0.3).r == 0.3
    two = DriveSpec(1.0, ((0.3, 0.1),))
    assert not two.is_single_harmonic()
    with pytest.raises(DomainError):
        _ = two.r


@pytest.mark.parametrize("omega", [0.0, -1.0, float("nan")])
def test_bad_frequency(omega):
    with pytest.raises(DomainError):
        DriveSpec(omega, ((0.1, 0.0),))


def test_empty_harmonics_rejected():
    with pytest.raises(DomainError):
        DriveSpec(1.0, ())


def test_from_dict_fills_gaps():
    spec = DriveSpec.from_dict({"omega": 1.0, "harmonics": [{"j": 3, "A": 0.5}]})
    assert spec.harmonics == ((0.0, 0.0), (0.0, 0.0), (0.5, 0.0))
    with pytest.raises(DomainError):
        DriveSpec.from_dict({"harmonics": []})


def test_bound_state_normalized():
    y = np.linspace(-40, 40, 400001)
    assert np.trapezoid(BoundState()(y) ** 2, y) == pytest.approx(1.0, rel=1e-6)
    assert BoundState().energy == -1.0


def test_continuum_state_formula():
    y = np.array([-2.0, 0.0, 1.5])
    k = -0.7
    u = ContinuumState(k)(y)
    ref = (np.exp(1j * k * y) - np.exp(1j * abs(k * y)) / (1 + 1j * abs(k))) / math.sqrt(2 * math.pi)
    np.testing.assert_allclose(u, ref, rtol=1e-15)
    assert ContinuumState(k).energy == pytest.approx(0.49)


def test_continuum_orthogonal_to_bound_state():
    y = np.linspace(-60, 60, 600001)
    for k in (0.3, 1.0, 2.5):
        overlap = np.trapezoid(BoundState()(y) * ContinuumState(k)(y), y)
        assert abs(overlap) < 1e-6


@given(st.floats(-50, 50))
def test_coupling_is_delta_matrix_element(k):
    direct = abs(BoundState()(0.0) * ContinuumState(k)(0.0)) ** 2
    assert bound_continuum_coupling(k) == pytest.approx(float(direct), rel=1e-12, abs=1e-300)


def test_photon_order():
    assert photon_order(2.0) == 1
    assert photon_order(1.0) == 2  # one photon reaches threshold exactly, not above it
    assert photon_order(0.75) == 2
    assert photon_order(0.45) == 3
    assert channel_momenta(2.0, 2) == pytest.approx([1.0, math.sqrt(3.0)])
