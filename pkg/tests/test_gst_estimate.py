"""Tests for the error-generator parameterization, LGST, and the MLE fit."""

import numpy as np
import pytest

from donorsim.gst.design import design_gst
from donorsim.gst.estimate import (
    _Likelihood,
    build_error_basis,
    estimate,
    gate_from_params,
    lgst,
    params_from_gate,
)
from donorsim.gst.gatesets import target_gateset
from donorsim.gst.simulate import exact_dataset, simulate_counts
from donorsim.superop import is_completely_positive, is_trace_preserving


def small_design():
    target = target_gateset(1)
    return target, design_gst(target, max_lengths=(1, 2))


def test_error_basis_hamiltonian_norms():
    assert np.allclose(build_error_basis(1).hamiltonian_norms, 2.0, atol=1e-12)
    assert np.allclose(build_error_basis(2).hamiltonian_norms, 8.0, atol=1e-12)


def test_error_basis_stochastic_diagonals():
    # rows run over (I, X, Y, Z) components, columns over the X, Y, Z jumps;
    # a jump damps the two anticommuting axes by 2 and fixes the rest
    diags = build_error_basis(1).stochastic_diagonals
    expected = np.array(
        [
            [0.0, 0.0, 0.0],
            [0.0, -2.0, -2.0],
            [-2.0, 0.0, -2.0],
            [-2.0, -2.0, 0.0],
        ]
    )
    assert np.allclose(diags, expected, atol=1e-12)


def test_error_basis_counts():
    basis = build_error_basis(2)
    assert len(basis.labels) == 15
    assert basis.n_params == 30
    assert basis.hamiltonian.shape == (15, 16, 16)


def test_gate_params_round_trip():
    basis = build_error_basis(1)
    target = target_gateset(1).gates["Gy"]
    rng = np.random.default_rng(11)
    for _ in range(10):
        h = rng.normal(0.0, 0.02, 3)
        s = np.abs(rng.normal(0.0, 0.005, 3))
        gate = gate_from_params(h, s, basis, target)
        h2, s2, resid = params_from_gate(gate, target, basis)
        assert np.allclose(h2, h, atol=1e-9)
        assert np.allclose(s2, s, atol=1e-9)
        assert resid < 1e-9


def test_parameterized_gates_are_tp_and_cp():
    basis = build_error_basis(1)
    target = target_gateset(1).gates["Gx"]
    rng = np.random.default_rng(3)
    for _ in range(20):
        h = rng.normal(0.0, 0.05, 3)
        s = np.abs(rng.normal(0.0, 0.01, 3))
        gate = gate_from_params(h, s, basis, target)
        assert is_trace_preserving(gate, atol=1e-10)
        assert is_completely_positive(gate, atol=1e-8)


def test_likelihood_gradient_matches_finite_differences():
    target, design = small_design()
    dataset = simulate_counts(target, design.circuits, shots=200, rng=1)
    engine = _Likelihood(dataset, target, build_error_basis(1))
    rng = np.random.default_rng(0)
    theta = rng.normal(0.0, 0.01, engine.n_params)
    for i in range(3):  # stochastic blocks must stay feasible
        lo = i * 6 + 3
        theta[lo : lo + 3] = np.abs(theta[lo : lo + 3])
    _, grad = engine.value_and_grad(theta)
    eps = 1e-6
    for i in range(engine.n_params):
        up, down = theta.copy(), theta.copy()
        up[i] += eps
        down[i] -= eps
        fd = (engine.value_and_grad(up)[0] - engine.value_and_grad(down)[0]) / (2 * eps)
        assert grad[i] == pytest.approx(fd, rel=1e-4, abs=1e-9)


def test_lgst_exact_on_ideal_data():
    target, design = small_design()
    dataset = exact_dataset(target, design.circuits, shots=1000)
    gs = lgst(dataset, design, target)
    for g in target.labels:
        assert np.allclose(gs.gates[g], target.gates[g], atol=1e-12)
    assert np.allclose(gs.rho, target.rho, atol=1e-12)
    for e in target.effects:
        assert np.allclose(gs.effects[e], target.effects[e], atol=1e-12)


def test_lgst_sees_injected_error_to_first_order():
    # LGST uses the noisy gates inside its own fiducials, so recovery is
    # first-order accurate only; the MLE refinement removes the rest
    basis = build_error_basis(1)
    target, design = small_design()
    noisy = target.copy()
    noisy.gates["Gx"] = gate_from_params(
        np.array([0.03, 0.0, 0.0]), np.zeros(3), basis, target.gates["Gx"]
    )
    dataset = exact_dataset(noisy, design.circuits, shots=1000)
    gs = lgst(dataset, design, target)
    gap = np.max(np.abs(gs.gates["Gx"] - noisy.gates["Gx"]))
    assert gap < 0.05  # right ballpark
    assert gap > 1e-6  # but genuinely inexact


def test_estimate_recovers_injected_errors_from_exact_data():
    basis = build_error_basis(1)
    target, design = small_design()
    noisy = target.copy()
    noisy.gates["Gx"] = gate_from_params(
        np.array([0.02, 0.0, 0.0]), np.zeros(3), basis, target.gates["Gx"]
    )
    noisy.gates["Gi"] = gate_from_params(
        np.zeros(3), np.full(3, 0.0025), basis, target.gates["Gi"]
    )
    dataset = exact_dataset(noisy, design.circuits, shots=10_000)
    result = estimate(dataset, design, target)
    assert result.converged
    assert result.n_iterations > 0

    h_x, s_x = result.params["Gx"]
    assert h_x[0] == pytest.approx(0.02, abs=1e-3)
    assert np.max(np.abs(h_x[1:])) < 1e-3
    assert np.max(s_x) < 1e-3

    _, s_i = result.params["Gi"]
    assert np.allclose(s_i, 0.0025, atol=1e-4)


def test_estimate_improves_on_seed():
    target, design = small_design()
    dataset = simulate_counts(target, design.circuits, shots=500, rng=9)
    result = estimate(dataset, design, target)
    assert result.nll <= result.diagnostics["nll_seed"] + 1e-12
    assert result.diagnostics["total_shots"] == 500 * len(design.circuits)


def test_estimated_gates_are_cptp():
    target, design = small_design()
    dataset = simulate_counts(target, design.circuits, shots=400, rng=2)
    result = estimate(dataset, design, target)
    for g in result.estimate.gates.values():
        assert is_trace_preserving(g, atol=1e-10)
        assert is_completely_positive(g, atol=1e-8)


def test_estimate_accepts_explicit_seed():
    target, design = small_design()
    dataset = exact_dataset(target, design.circuits, shots=1000)
    result = estimate(dataset, design, target, seed_gateset=target.copy())
    for g in target.labels:
        assert np.allclose(result.estimate.gates[g], target.gates[g], atol=1e-6)


def test_estimate_error_shrinks_with_shots():
    """Statistical consistency: more shots move the median estimate (over
    seeds) closer to the generating gate set."""
    target, design = small_design()
    gaps = {}
    for shots in (300, 30_000):
        errs = []
        for seed in range(3):
            dataset = simulate_counts(target, design.circuits, shots=shots, rng=seed)
            result = estimate(dataset, design, target)
            errs.append(
                max(
                    np.max(np.abs(result.estimate.gates[g] - target.gates[g]))
                    for g in target.labels
                )
            )
        gaps[shots] = float(np.median(errs))
    assert gaps[30_000] < gaps[300]
