"""Tests for the control-phase / solid-angle analysis."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from donorsim.geometric import (
    geometric_phase_analysis,
    signed_solid_angle,
    wrap_phase,
)

# frozen regression point: rabi 0.5 MHz, resonant-calibrated 2 pi pulse,
# detuning 0.05 MHz
FROZEN_DETUNED_CONTROL_PHASE = 2.828992627252167


@given(st.floats(min_value=-50.0, max_value=50.0))
def test_wrap_phase_range_and_equivalence(x):
    w = wrap_phase(x)
    assert -math.pi < w <= math.pi
    assert math.remainder(w - x, 2.0 * math.pi) == pytest.approx(0.0, abs=1e-9)


def test_wrap_phase_fixed_points():
    assert wrap_phase(0.0) == 0.0
    assert wrap_phase(math.pi) == math.pi
    assert wrap_phase(-math.pi) == math.pi
    assert wrap_phase(3.0 * math.pi) == pytest.approx(math.pi)


def test_resonant_full_rotation_pins_the_sign():
    """A resonant 2 pi rotation sweeps a great circle: branch phase pi,
    solid angle +2 pi, so both sides of the comparison land on pi."""
    r = geometric_phase_analysis(0.0, 0.5, 2.0 * math.pi)
    assert r.control_phase == pytest.approx(math.pi, abs=1e-9)
    assert r.half_solid_angle == pytest.approx(math.pi, abs=1e-9)
    assert r.solid_angle == pytest.approx(2.0 * math.pi, abs=1e-9)
    assert r.dynamical_phase == pytest.approx(0.0, abs=1e-12)


def test_detuned_rotation_frozen_value():
    r = geometric_phase_analysis(0.05, 0.5, 2.0 * math.pi)
    assert r.control_phase == pytest.approx(FROZEN_DETUNED_CONTROL_PHASE, abs=1e-9)
    assert r.half_solid_angle == pytest.approx(r.control_phase, abs=1e-6)
    # dynamical part is -2 pi <H> T with <H> = -detuning/2 for the down state
    assert r.dynamical_phase == pytest.approx(math.pi * 0.05 * 2.0, abs=1e-12)


def test_control_phase_equals_half_solid_angle_across_detunings():
    rabi = 0.2
    for d in np.linspace(0.0, 0.3 * rabi, 13):
        r = geometric_phase_analysis(d, rabi, 2.0 * math.pi)
        gap = abs(wrap_phase(r.control_phase - r.half_solid_angle))
        assert gap < 1e-3


def test_analysis_input_validation():
    with pytest.raises(ValueError):
        geometric_phase_analysis(0.0, 0.0, 2.0 * math.pi)
    with pytest.raises(ValueError):
        geometric_phase_analysis(0.5, 0.2, 2.0 * math.pi)  # detuning >= 2 rabi
    with pytest.raises(ValueError):
        geometric_phase_analysis(0.0, 0.2, -1.0)


def test_orthogonal_endpoint_is_rejected():
    # a resonant pi pulse maps down to up; the branch phase is undefined
    with pytest.raises(ValueError):
        geometric_phase_analysis(0.0, 0.5, math.pi)


def test_trajectory_starts_down_and_stays_normalized():
    r = geometric_phase_analysis(0.03, 0.5, 2.0 * math.pi)
    assert np.allclose(r.trajectory[0], [0.0, 0.0, -1.0], atol=1e-9)
    assert np.allclose(np.linalg.norm(r.trajectory, axis=1), 1.0, atol=1e-9)


def test_solid_angle_great_circle():
    t = np.linspace(0.0, 2.0 * np.pi, 400)
    equator = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
    assert signed_solid_angle(equator) == pytest.approx(2.0 * np.pi, abs=1e-6)


def test_solid_angle_polar_cap():
    alpha = 0.7
    t = np.linspace(0.0, 2.0 * np.pi, 2000)
    cap = np.stack(
        [
            np.sin(alpha) * np.cos(t),
            np.sin(alpha) * np.sin(t),
            np.full_like(t, np.cos(alpha)),
        ],
        axis=1,
    )
    assert signed_solid_angle(cap) == pytest.approx(
        2.0 * np.pi * (1.0 - np.cos(alpha)), abs=1e-4
    )


def test_solid_angle_octant_exact():
    # geodesic closure makes a three-point octant path exact
    octant = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert signed_solid_angle(octant) == pytest.approx(np.pi / 2.0, abs=1e-12)
    assert signed_solid_angle(octant[::-1]) == pytest.approx(-np.pi / 2.0, abs=1e-12)


def test_solid_angle_rejects_antipodal_closure():
    path = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
    with pytest.raises(ValueError):
        signed_solid_angle(path)
