"""Tests for the noisy device model and the experiment-matrix driver."""

import math

import numpy as np
import pytest

from donorsim import superop
from donorsim.gst.budget import average_fidelity
from donorsim.gst.gatesets import target_gateset
from donorsim.gst.suite import (
    DEVICE_XY_MISALIGNMENTS,
    make_noisy_device,
    run_paper_suite,
)
from donorsim.pulses import Gate, native_gate
from donorsim.spin import NuclearConfig, SpinSystemParams

TARGET_2Q = target_gateset(2)


def test_default_device_is_cptp():
    device = make_noisy_device()
    eye_row = np.eye(16)[0]
    for label, gate in device.gates.items():
        assert np.allclose(gate[0], eye_row, atol=1e-10)
        assert superop.is_completely_positive(gate, atol=1e-8)
        f = average_fidelity(gate, TARGET_2Q.gates[label])
        assert 0.98 < f < 1.0


def test_clean_device_reduces_to_native_pulses():
    clean = make_noisy_device(incoherent_scale=0.0, coherent_scale=0.0)
    assert np.allclose(clean.gates["Gi"], np.eye(16), atol=1e-12)
    u = native_gate(
        SpinSystemParams(), Gate("CROT", "Q1", math.pi / 2.0, 0.0), NuclearConfig()
    )
    assert np.allclose(clean.gates["Gx_q1c0"], superop.ptm_from_unitary(u), atol=1e-12)
    # residual infidelity is the exchange mixing of the native rotations
    for label in TARGET_2Q.labels:
        assert average_fidelity(clean.gates[label], TARGET_2Q.gates[label]) > 0.999


def test_coherent_only_device_is_unitary():
    device = make_noisy_device(incoherent_scale=0.0)
    g = device.gates["Gx_q1c0"]
    assert np.allclose(g @ g.T, np.eye(16), atol=1e-10)
    noisy = make_noisy_device(coherent_scale=0.0)
    g = noisy.gates["Gi"]
    assert not np.allclose(g @ g.T, np.eye(16), atol=1e-6)


def test_pulse_mode_tracks_ideal_mode():
    clean = make_noisy_device(incoherent_scale=0.0, coherent_scale=0.0)
    pulsed = make_noisy_device(incoherent_scale=0.0, coherent_scale=0.0, mode="pulse")
    worst = min(
        average_fidelity(pulsed.gates[label], clean.gates[label])
        for label in TARGET_2Q.labels
    )
    assert worst > 0.9999


def test_unknown_device_mode_rejected():
    with pytest.raises(ValueError, match="mode"):
        make_noisy_device(mode="adiabatic")


def test_conditional_suite_reduced():
    device = make_noisy_device()
    report = run_paper_suite(
        "cond-1q", device, shots=1500, rng=11, max_lengths_1q=(1, 2, 4)
    )
    assert report["mode"] == "cond-1q"
    assert [run["name"] for run in report["runs"]] == [
        "cond-q1c0", "cond-q1c1", "cond-q2c0", "cond-q2c1",
    ]
    for run in report["runs"]:
        assert run["converged"]
        assert run["n_circuits"] == 474
        assert run["shots"] == 1500
        assert 0.99 < run["fidelities"]["Gx"] < 1.0
        assert 0.99 < run["fidelities"]["Gy"] < 1.0
        assert 0.97 < run["fidelities"]["Gi"] < 1.0
        assert set(run["budget"]["relational_misalignment"]) == {"Gx/Gy"}
        gates = run["budget"]["gates"]
        assert set(gates) == {"Gi", "Gx", "Gy"}
        assert 0.0 <= gates["Gx"]["incoherent_fraction"] <= 1.0


def test_conditional_suite_recovers_xy_misalignments():
    device = make_noisy_device()
    report = run_paper_suite(
        "cond-1q", device, shots=1500, rng=11, max_lengths_1q=(1, 2, 4)
    )
    for run in report["runs"]:
        injected = DEVICE_XY_MISALIGNMENTS[(run["target_qubit"], run["control_state"])]
        recovered = run["budget"]["relational_misalignment"]["Gx/Gy"]
        assert math.copysign(1.0, recovered) == math.copysign(1.0, injected)
        assert recovered == pytest.approx(injected, abs=5e-3)


def test_axis_offsets_are_pure_gauge_for_conditional_runs():
    # a common rotation of one configuration's X and Y axes is a frame
    # choice; only the cross-configuration comparison can see it
    device = make_noisy_device(
        incoherent_scale=0.0,
        over_rotations={},
        xy_misalignments={},
        idle_rotation=(0.0, 0.0, 0.0),
    )
    report = run_paper_suite(
        "cond-1q", device, shots=2000, rng=17, max_lengths_1q=(1, 2, 4)
    )
    for run in report["runs"]:
        for fid in run["fidelities"].values():
            assert fid > 0.998


def test_unconditional_suite_covers_spectator_grid():
    device = make_noisy_device()
    report = run_paper_suite(
        "uncond-1q", device, shots=800, rng=12, max_lengths_1q=(1, 2)
    )
    names = [run["name"] for run in report["runs"]]
    assert names == [
        f"uncond-{tq}-spectator-{spec}"
        for tq in ("q1", "q2")
        for spec in ("down", "plus", "up")
    ]
    for run in report["runs"]:
        assert run["spectator"] in ("down", "plus", "up")
        for fid in run["fidelities"].values():
            assert 0.97 < fid < 1.0


def test_unknown_suite_mode_rejected():
    device = make_noisy_device()
    with pytest.raises(ValueError, match="mode"):
        run_paper_suite("3q", device)
