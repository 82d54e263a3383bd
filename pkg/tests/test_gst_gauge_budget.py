"""Tests for gauge fixing, fidelities, and the error-budget decomposition."""

import math

import numpy as np
import pytest

from donorsim.gst.budget import (
    average_fidelity,
    entanglement_fidelity,
    error_budget,
    fidelity,
    gate_budget,
    hamiltonian_axis,
    relational_misalignment,
)
from donorsim.gst.estimate import build_error_basis, gate_from_params
from donorsim.gst.gatesets import rotation_unitary, target_gateset
from donorsim.gst.gauge import apply_gauge, gauge_optimize, gauge_transform_matrix
from donorsim.superop import ptm_from_unitary

BASIS = build_error_basis(1)
TARGET = target_gateset(1)


def test_gauge_transform_is_orthogonal():
    t = gauge_transform_matrix(np.array([0.1, -0.2, 0.3]), BASIS)
    assert np.allclose(t @ t.T, np.eye(4), atol=1e-12)


def test_gauge_leaves_probabilities_unchanged():
    t = gauge_transform_matrix(np.array([0.02, -0.03, 0.05]), BASIS)
    moved = apply_gauge(TARGET, t)
    for circuit in [(), ("Gx",), ("Gx", "Gy", "Gx"), ("Gi", "Gy")]:
        assert np.allclose(
            moved.probabilities(circuit), TARGET.probabilities(circuit), atol=1e-12
        )


def test_gauge_optimize_recovers_displaced_frame():
    t = gauge_transform_matrix(np.array([0.02, -0.03, 0.05]), BASIS)
    moved = apply_gauge(TARGET, t)
    back, _, objective = gauge_optimize(moved, TARGET)
    assert objective < 1e-12
    for g in TARGET.labels:
        assert np.allclose(back.gates[g], TARGET.gates[g], atol=1e-6)
    assert np.allclose(back.rho, TARGET.rho, atol=1e-6)


def test_depolarizing_average_fidelity_exact():
    p = 0.013
    depol = np.diag([1.0, 1.0 - p, 1.0 - p, 1.0 - p])
    assert average_fidelity(depol, TARGET.gates["Gi"]) == pytest.approx(
        1.0 - p / 2.0, abs=1e-12
    )
    assert entanglement_fidelity(depol, TARGET.gates["Gi"]) == pytest.approx(
        1.0 - 0.75 * p, abs=1e-12
    )


def test_small_over_rotation_infidelity():
    # a pure rotation error by angle eps costs (2 + cos eps)/3, i.e.
    # eps^2/6 to leading order
    eps = math.radians(2.0)
    gate = gate_from_params(np.array([eps, 0.0, 0.0]), np.zeros(3), BASIS, TARGET.gates["Gx"])
    rep = fidelity(gate, TARGET.gates["Gx"], BASIS)
    assert rep.infidelity == pytest.approx(eps**2 / 6.0, rel=1e-3)
    assert rep.generator == pytest.approx(rep.average, rel=1e-6)


def test_fidelity_rejects_non_cp_input():
    transpose_map = np.diag([1.0, 1.0, -1.0, 1.0])
    with pytest.raises(ValueError, match="not completely positive"):
        fidelity(transpose_map, TARGET.gates["Gi"], BASIS)


def test_hamiltonian_axis_of_target_rotation():
    axis, angle = hamiltonian_axis(TARGET.gates["Gx"], BASIS)
    assert np.allclose(axis, [1.0, 0.0, 0.0], atol=1e-12)
    assert angle == pytest.approx(math.pi / 2.0, abs=1e-12)


def test_hamiltonian_axis_rejects_identity():
    with pytest.raises(ValueError):
        hamiltonian_axis(TARGET.gates["Gi"], BASIS)


def test_budget_splits_parallel_and_perpendicular_errors():
    eps = math.radians(2.0)
    over = gate_from_params(np.array([eps, 0.0, 0.0]), np.zeros(3), BASIS, TARGET.gates["Gx"])
    b = gate_budget(over, TARGET.gates["Gx"], BASIS, "Gx")
    assert b.over_rotation == pytest.approx(eps, abs=1e-9)
    assert b.axis_misalignment == pytest.approx(0.0, abs=1e-9)

    tilted = gate_from_params(np.array([0.0, 0.01, 0.0]), np.zeros(3), BASIS, TARGET.gates["Gx"])
    b = gate_budget(tilted, TARGET.gates["Gx"], BASIS, "Gx")
    assert b.over_rotation == pytest.approx(0.0, abs=1e-9)
    assert b.axis_misalignment == pytest.approx(0.01, abs=1e-9)


def test_budget_stochastic_scalars():
    s = np.array([0.004, 0.004, 0.009])
    gate = gate_from_params(np.zeros(3), s, BASIS, TARGET.gates["Gi"])
    b = gate_budget(gate, TARGET.gates["Gi"], BASIS, "Gi")
    assert b.dephasing == pytest.approx(0.005, abs=1e-9)
    assert b.depolarization == pytest.approx(0.004, abs=1e-9)
    assert 0.0 <= b.incoherent_fraction <= 1.0


def test_idle_budget_uses_phase_axis():
    # the idle has no rotation axis; Z errors count as phase accumulation
    # (signed), transverse errors as misalignment
    phase = gate_from_params(np.array([0.0, 0.0, -0.012]), np.zeros(3), BASIS, TARGET.gates["Gi"])
    b = gate_budget(phase, TARGET.gates["Gi"], BASIS, "Gi")
    assert b.over_rotation == pytest.approx(-0.012, abs=1e-9)
    assert b.axis_misalignment == pytest.approx(0.0, abs=1e-9)

    drift = gate_from_params(np.array([0.012, 0.0, 0.0]), np.zeros(3), BASIS, TARGET.gates["Gi"])
    b = gate_budget(drift, TARGET.gates["Gi"], BASIS, "Gi")
    assert b.over_rotation == pytest.approx(0.0, abs=1e-9)
    assert b.axis_misalignment == pytest.approx(0.012, abs=1e-9)


def test_coherent_plus_incoherent_matches_total_to_linear_order():
    gate = gate_from_params(
        np.array([0.02, 0.005, 0.0]),
        np.array([0.003, 0.001, 0.002]),
        BASIS,
        TARGET.gates["Gx"],
    )
    rep = fidelity(gate, TARGET.gates["Gx"], BASIS)
    b = gate_budget(gate, TARGET.gates["Gx"], BASIS)
    split = b.coherent_infidelity + b.incoherent_infidelity
    assert abs(rep.infidelity - split) / rep.infidelity < 0.10
    assert b.generator_fidelity == pytest.approx(1.0 - split, abs=1e-12)


def test_relational_misalignment_exact_squeeze():
    squeeze = math.radians(1.0)
    gy_squeezed = ptm_from_unitary(rotation_unitary(math.pi / 2.0, math.pi / 2.0 - squeeze))
    rel = relational_misalignment(TARGET.gates["Gx"], gy_squeezed, BASIS)
    assert rel == pytest.approx(-squeeze, abs=1e-9)


def test_relational_misalignment_is_gauge_invariant():
    squeeze = math.radians(1.0)
    gy_squeezed = ptm_from_unitary(rotation_unitary(math.pi / 2.0, math.pi / 2.0 - squeeze))
    rel = relational_misalignment(TARGET.gates["Gx"], gy_squeezed, BASIS)
    # conjugating both gates by any frame rotation must not move the angle
    t = gauge_transform_matrix(np.array([0.0, 0.0, 0.3]), BASIS)
    rel_rotated = relational_misalignment(
        t @ TARGET.gates["Gx"] @ t.T, t @ gy_squeezed @ t.T, BASIS
    )
    assert rel_rotated == pytest.approx(rel, abs=1e-12)
    t = gauge_transform_matrix(np.array([0.1, -0.2, 0.07]), BASIS)
    rel_general = relational_misalignment(
        t @ TARGET.gates["Gx"] @ t.T, t @ gy_squeezed @ t.T, BASIS
    )
    assert rel_general == pytest.approx(rel, abs=1e-9)


def test_large_rotation_error_carries_branch_warning():
    gate = gate_from_params(np.array([1.8, 0.0, 0.0]), np.zeros(3), BASIS, TARGET.gates["Gi"])
    b = gate_budget(gate, TARGET.gates["Gi"], BASIS)
    assert b.warning is not None and "branch" in b.warning
    small = gate_from_params(np.array([0.01, 0.0, 0.0]), np.zeros(3), BASIS, TARGET.gates["Gi"])
    assert gate_budget(small, TARGET.gates["Gi"], BASIS).warning is None


def test_error_budget_covers_gates_and_xy_pairs():
    budget = error_budget(TARGET, TARGET)
    assert set(budget.gates) == set(TARGET.labels)
    assert list(budget.relational_misalignment) == [("Gx", "Gy")]
    for b in budget.gates.values():
        assert b.infidelity == pytest.approx(0.0, abs=1e-12)

    two = target_gateset(2)
    budget2 = error_budget(two, two)
    assert len(budget2.relational_misalignment) == 4
    assert ("Gx_q1c0", "Gy_q1c0") in budget2.relational_misalignment
