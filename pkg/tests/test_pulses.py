"""Tests for gate objects, pulse synthesis, and circuit application."""

import math

import numpy as np
import pytest

from donorsim.spin import NuclearConfig, SpinSystemParams, eigenstates
from donorsim.pulses import (
    CircuitNoise,
    Gate,
    PulseSpec,
    apply_circuit,
    bell_prep_circuit,
    circuit_unitary,
    crot,
    expand_gate,
    gate_duration,
    idle,
    native_gate,
    propagate_pulse,
    pulse_for_gate,
    reversed_circuit,
    unconditional_gate,
    x90,
    y90,
    zcrot,
)
from donorsim.states import bell_state, density, ket

PARAMS = SpinSystemParams()
COS_THETA = 0.9985762749834909

# frozen transition frequencies for the default system and nuclei (n1 up,
# n2 down), from the effective-model eigenenergies
LINE_Q1_DOWN = 28021.815978185667
LINE_Q1_UP = 28033.815978185667
LINE_Q2_DOWN = 27909.174955463037
LINE_Q2_UP = 27921.174955463037


def rotation_2x2(angle: float, axis: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array(
        [[c, -1j * s * np.exp(-1j * axis)], [-1j * s * np.exp(1j * axis), c]]
    )


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("Hadamard", "Q1", math.pi, 0.0)
    with pytest.raises(ValueError):
        Gate("Idle", "Q1", 0.0, 0.0)
    with pytest.raises(ValueError):
        Gate("CROT", None, math.pi, 0.0)
    with pytest.raises(ValueError):
        Gate("CROT", "Q3", math.pi, 0.0)


def test_gate_control_sides():
    assert crot("Q1").control == "down"
    assert zcrot("Q2").control == "up"
    assert x90("Q1").control == "none"
    assert idle().control == "none"


def test_gate_helpers():
    g = y90("Q2")
    assert g.kind == "Y90"
    assert g.angle == pytest.approx(math.pi / 2)
    assert g.axis == pytest.approx(math.pi / 2)
    assert idle().target is None


@pytest.mark.parametrize(
    "gate,rabi,expected_us",
    [
        (idle(), 0.2, 1.25),
        (crot("Q2", math.pi), 0.2, 2.5),
        (zcrot("Q1", math.pi / 2), 0.2, 1.25),
        (x90("Q1"), 0.2, 2.5),  # composite: two conditional half rotations
        (crot("Q2", math.pi), 0.5, 1.0),
    ],
)
def test_gate_durations(gate, rabi, expected_us):
    assert gate_duration(gate, rabi) == pytest.approx(expected_us, rel=1e-12)


def test_pulse_spec_needs_positive_frequency():
    with pytest.raises(ValueError):
        PulseSpec(frequency=0.0, duration=1.0)
    with pytest.raises(ValueError):
        PulseSpec(frequency=-5.0, duration=1.0)


@pytest.mark.parametrize(
    "gate,line",
    [
        (crot("Q1", math.pi), LINE_Q1_DOWN),
        (zcrot("Q1", math.pi), LINE_Q1_UP),
        (crot("Q2", math.pi), LINE_Q2_DOWN),
        (zcrot("Q2", math.pi), LINE_Q2_UP),
    ],
)
def test_pulse_frequency_hits_transition(gate, line):
    pulse = pulse_for_gate(PARAMS, gate, rabi=0.2)
    assert pulse.frequency == pytest.approx(line, abs=1e-9)
    assert pulse.duration == pytest.approx(2.5, rel=1e-12)


def test_pulse_for_gate_rejects_composites_and_idle():
    with pytest.raises(ValueError):
        pulse_for_gate(PARAMS, x90("Q1"))
    with pytest.raises(ValueError):
        pulse_for_gate(PARAMS, idle())


def test_native_gate_is_unitary():
    for gate in (crot("Q1", math.pi), zcrot("Q2", 0.7, 1.1)):
        u = native_gate(PARAMS, gate)
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


def test_native_gate_rejects_composites():
    with pytest.raises(ValueError):
        native_gate(PARAMS, x90("Q1"))


def test_native_gate_uncoupled_is_product_rotation():
    """With zero exchange the eigenbasis is the product basis, so the
    conditional rotation must equal its textbook two-qubit matrix."""
    p0 = SpinSystemParams(j=0.0)
    up = np.diag([1.0, 0.0])
    down = np.diag([0.0, 1.0])

    r = rotation_2x2(math.pi, 0.0)
    u = native_gate(p0, crot("Q2", math.pi, 0.0))
    expected = np.kron(up, np.eye(2)) + np.kron(down, r)
    assert np.allclose(u, expected, atol=1e-12)

    r = rotation_2x2(math.pi / 2, 0.4)
    u = native_gate(p0, zcrot("Q1", math.pi / 2, 0.4))
    expected = np.kron(np.eye(2), down) + np.kron(r, up)
    assert np.allclose(u, expected, atol=1e-12)


def test_native_pi_gate_squares_to_block_sign_flip():
    gate = crot("Q2", math.pi, 0.0)
    u = native_gate(PARAMS, gate)
    u_two_pi = native_gate(PARAMS, crot("Q2", 2.0 * math.pi, 0.0))
    assert np.allclose(u @ u, u_two_pi, atol=1e-12)
    # a 2 pi rotation is -1 on the driven pair of eigenlevels, +1 elsewhere
    sol = eigenstates(PARAMS, NuclearConfig())
    diag = np.diag(sol.states.conj().T @ u_two_pi @ sol.states)
    assert np.allclose(sorted(diag.real), [-1.0, -1.0, 1.0, 1.0], atol=1e-12)


def test_unconditional_pair_covers_both_control_branches():
    gates = unconditional_gate(PARAMS, "Q1", math.pi / 2, 0.3)
    assert [g.kind for g in gates] == ["CROT", "zCROT"]
    assert all(g.target == "Q1" and g.axis == 0.3 for g in gates)


def test_unconditional_uncoupled_equals_plain_rotation():
    p0 = SpinSystemParams(j=0.0)
    r = rotation_2x2(math.pi / 2, 0.0)
    u = np.eye(4, dtype=complex)
    for g in unconditional_gate(p0, "Q1", math.pi / 2, 0.0):
        u = native_gate(p0, g) @ u
    assert np.allclose(u, np.kron(r, np.eye(2)), atol=1e-12)


def test_unconditional_coupled_deviates_by_mixing_angle():
    """With exchange on, the two control branches act in slightly rotated
    eigenbases, so the composite only approximates the plain rotation."""
    r = rotation_2x2(math.pi / 2, 0.0)
    u = np.eye(4, dtype=complex)
    for g in unconditional_gate(PARAMS, "Q2", math.pi / 2, 0.0):
        u = native_gate(PARAMS, g) @ u
    gap = np.max(np.abs(u - np.kron(np.eye(2), r)))
    assert 0.02 < gap < 0.06


def test_expand_gate():
    assert expand_gate(crot("Q1")) == [crot("Q1")]
    parts = expand_gate(y90("Q2"))
    assert [g.kind for g in parts] == ["CROT", "zCROT"]
    assert all(g.angle == pytest.approx(math.pi / 2) for g in parts)
    assert all(g.axis == pytest.approx(math.pi / 2) for g in parts)


def test_apply_circuit_matches_circuit_unitary():
    circ = [crot("Q1", math.pi / 2, 0.2), zcrot("Q2", math.pi, 1.0), x90("Q1")]
    rho = apply_circuit(density(ket("dd")), circ)
    psi = circuit_unitary(circ) @ ket("dd")
    assert np.allclose(rho, np.outer(psi, psi.conj()), atol=1e-12)


def test_apply_circuit_unknown_mode_raises():
    with pytest.raises(ValueError):
        apply_circuit(density(ket("dd")), [crot("Q2")], mode="magic")


def test_bell_prep_exact_in_eigenbasis():
    """The two-pulse preparation lands exactly on the maximally entangled
    state: the intermediate level mixing cancels because the second pulse
    transfers the full eigenstate population."""
    psi = circuit_unitary(bell_prep_circuit()) @ ket("dd")
    fid = abs(bell_state("phi_plus").conj() @ psi) ** 2
    assert fid == pytest.approx(1.0, abs=1e-12)


def test_bell_prep_pulse_mode_high_fidelity():
    rho = apply_circuit(density(ket("dd")), bell_prep_circuit(), mode="pulse", rabi=0.2)
    phip = bell_state("phi_plus")
    fid = (phip.conj() @ rho @ phip).real
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)
    assert fid > 0.9999


def test_reversed_circuit_inverts_ideal_circuit():
    circ = [crot("Q1", math.pi / 2, 0.0), zcrot("Q2", math.pi, math.pi / 2)]
    w = circuit_unitary(circ + reversed_circuit(circ, 0.0))
    assert abs(w[0, 0]) > 0.99  # proportional to the identity
    assert np.allclose(w / w[0, 0], np.eye(4), atol=1e-10)


def test_reversed_circuit_keeps_idle_and_shifts_axes():
    circ = [idle(), crot("Q2", 0.7, 0.1)]
    rev = reversed_circuit(circ, 0.25)
    assert rev[0].kind == "CROT"
    assert rev[0].axis == pytest.approx(0.1 + math.pi + 0.25)
    assert rev[0].angle == pytest.approx(0.7)
    assert rev[1].kind == "Idle"


def test_rwa_propagator_matches_ideal_gate():
    gate = crot("Q2", math.pi, 0.0)
    pulse = pulse_for_gate(PARAMS, gate, rabi=0.2)
    u_rwa = propagate_pulse(PARAMS, pulse)
    assert np.allclose(u_rwa @ u_rwa.conj().T, np.eye(4), atol=1e-10)

    # compare transition amplitudes in the eigenbasis; interaction-picture
    # phases drop out of the moduli
    v = eigenstates(PARAMS, NuclearConfig()).states
    a = np.abs(v.conj().T @ u_rwa @ v)
    b = np.abs(v.conj().T @ native_gate(PARAMS, gate) @ v)
    assert np.max(np.abs(a - b)) < 5e-3

    # product-basis transfer dd -> du is capped by the level mixing
    transfer = abs(ket("du").conj() @ u_rwa @ ket("dd")) ** 2
    assert transfer == pytest.approx(COS_THETA**2, abs=1e-4)

    spectator = abs(ket("uu").conj() @ u_rwa @ ket("uu")) ** 2
    assert spectator > 0.999995


def test_rwa_off_resonant_leakage_shrinks_with_drive():
    gate = crot("Q2", math.pi, 0.0)
    v = eigenstates(PARAMS, NuclearConfig()).states

    def worst_leakage(rabi):
        pulse = pulse_for_gate(PARAMS, gate, rabi=rabi)
        u = np.abs(v.conj().T @ propagate_pulse(PARAMS, pulse) @ v)
        ideal = np.abs(v.conj().T @ native_gate(PARAMS, gate) @ v)
        return np.max(np.abs(u - ideal))

    assert worst_leakage(0.05) < worst_leakage(0.2) / 2.0


def test_rwa_start_time_dependence_is_small():
    gate = crot("Q2", math.pi, 0.0)
    u0 = propagate_pulse(PARAMS, pulse_for_gate(PARAMS, gate, rabi=0.2, start=0.0))
    u1 = propagate_pulse(PARAMS, pulse_for_gate(PARAMS, gate, rabi=0.2, start=7.3))
    assert np.max(np.abs(u0 - u1)) < 5e-3


def test_exact_mode_validates_rwa_on_scaled_system():
    """Piecewise lab-frame integration (no rotating-wave step) agrees with
    the RWA propagator once the carrier is far above the Rabi frequency."""
    toy = SpinSystemParams(b0=100.0 / 27971.49546682435, a1=8.0, a2=4.0, j=1.0)
    pulse = pulse_for_gate(toy, crot("Q2", math.pi, 0.3), rabi=0.25)
    u_exact = propagate_pulse(toy, pulse, mode="exact")
    u_rwa = propagate_pulse(toy, pulse, mode="rwa")
    assert np.allclose(u_exact @ u_exact.conj().T, np.eye(4), atol=1e-10)
    assert np.max(np.abs(u_exact - u_rwa)) < 0.01


def test_propagate_pulse_unknown_mode_raises():
    pulse = pulse_for_gate(PARAMS, crot("Q2"), rabi=0.2)
    with pytest.raises(ValueError):
        propagate_pulse(PARAMS, pulse, mode="floquet")


def test_control_dephasing_hits_the_control_qubit():
    """A zero-angle conditional rotation leaves the state alone, so the only
    effect is the phase-flip channel on the control electron."""
    lam = 0.07
    plus_q1 = (ket("ud") + ket("dd")) / np.sqrt(2.0)
    out = apply_circuit(
        density(plus_q1),
        [Gate("CROT", "Q2", 0.0, 0.0)],
        noise=CircuitNoise(control_dephasing=lam),
    )
    assert out[1, 3] == pytest.approx(0.5 * (1.0 - 2.0 * lam), abs=1e-12)
    assert out[1, 1].real == pytest.approx(0.5, abs=1e-12)


def test_idle_t1_decay_populations():
    t1 = 40.0
    duration = gate_duration(idle(), 0.2)
    out = apply_circuit(
        density(ket("uu")), [idle()], noise=CircuitNoise(t1=t1), rabi=0.2
    )
    survive = math.exp(-duration / t1)
    assert out[0, 0].real == pytest.approx(survive**2, abs=1e-12)
    assert out[1, 1].real == pytest.approx(survive * (1.0 - survive), abs=1e-12)
    assert out[3, 3].real == pytest.approx((1.0 - survive) ** 2, abs=1e-12)


def test_depolarizing_noise_targets_the_driven_qubit():
    # |uu> sits outside the CROT block, so the ideal gate is a no-op and the
    # depolarizing channel acts on Q2 alone
    rate, duration = 0.01, 2.5
    out = apply_circuit(
        density(ket("uu")),
        [crot("Q2", math.pi, 0.0)],
        noise=CircuitNoise(depol_rate=rate),
        rabi=0.2,
    )
    p = 1.0 - math.exp(-rate * duration)
    assert out[0, 0].real == pytest.approx(1.0 - p / 2.0, abs=1e-12)
    assert out[1, 1].real == pytest.approx(p / 2.0, abs=1e-12)
    assert out[2, 2].real == pytest.approx(0.0, abs=1e-12)


def test_idle_noise_depolarizes_both_qubits():
    rate = 0.01
    duration = gate_duration(idle(), 0.2)
    out = apply_circuit(
        density(ket("uu")), [idle()], noise=CircuitNoise(depol_rate=rate), rabi=0.2
    )
    p = 1.0 - math.exp(-rate * duration)
    assert out[0, 0].real == pytest.approx((1.0 - p / 2.0) ** 2, abs=1e-12)
    assert out[3, 3].real == pytest.approx((p / 2.0) ** 2, abs=1e-12)
