"""Microwave pulses, native conditional gates, and circuit application.

Frame conventions
-----------------
All gates and pulse propagators live in the interaction picture of the
effective electron Hamiltonian: each energy eigenstate rotates at its own
frequency, so an undriven system does nothing and an ideal resonant pulse is
a pure two-level rotation embedded in the 4-dim space. A square pulse at
carrier f with drive phase phi is integrated in the frame co-rotating at f
(keeping every line's detuning, dropping only counter-rotating terms), then
transformed back, which reintroduces the accumulated phases of the
off-resonant levels. The transformation depends on the pulse's absolute
start time; `apply_circuit` tracks wall-clock time so multi-pulse sequences
compose like phase-locked synthesizers, one per carrier.

A gate with axis angle a rotates about cos(a) X + sin(a) Y of its two-level
block; the drive phase equals the axis angle. Durations follow from the
Rabi frequency: angle / (2 pi rabi), so a pi pulse lasts 1 / (2 rabi). The
explicit idle lasts as long as a pi/2 pulse.

Native gates are conditional: 'CROT' rotates the target electron when the
other electron is down, 'zCROT' when it is up. Unconditional rotations are
circuits of two conditional ones (control down, then control up). 'Idle' is
the identity in this frame; only noise channels make it non-trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .spin import (
    NuclearConfig,
    SpinSystemParams,
    SX,
    STATE_LABELS,
    eigenstates,
    _dominant_labels,
    _site_op,
)
from . import superop

DEFAULT_RABI_MHZ = 0.2

NATIVE_KINDS = ("CROT", "zCROT", "Idle")
COMPOSITE_KINDS = ("X90", "Y90")


@dataclass(frozen=True)
class PulseSpec:
    """One square microwave pulse.

    frequency is the carrier in MHz, rabi the on-resonance Rabi frequency of
    the addressed line in MHz, phase the drive phase in radians (equal to
    the rotation axis angle), duration in microseconds, start in
    microseconds of wall-clock time.
    """

    frequency: float
    duration: float
    rabi: float = DEFAULT_RABI_MHZ
    phase: float = 0.0
    start: float = 0.0
    shape: str = "square"

    def __post_init__(self) -> None:
        if self.frequency <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.rabi <= 0:
            raise ValueError("rabi frequency must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.shape != "square":
            raise ValueError(f"unsupported pulse shape {self.shape!r}")


@dataclass(frozen=True)
class Gate:
    """A labeled gate. kind in {'CROT', 'zCROT', 'X90', 'Y90', 'Idle'}.

    Conditional kinds carry the control state implicitly: CROT acts when the
    non-target electron is down, zCROT when it is up. X90/Y90 are
    unconditional composites, Idle acts on nobody.
    """

    kind: str
    target: str | None = None
    angle: float = math.pi
    axis: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in NATIVE_KINDS + COMPOSITE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "Idle":
            if self.target is not None:
                raise ValueError("Idle takes no target")
        elif self.target not in ("Q1", "Q2"):
            raise ValueError(f"gate {self.kind} needs target 'Q1' or 'Q2'")

    @property
    def control(self) -> str:
        if self.kind == "CROT":
            return "down"
        if self.kind == "zCROT":
            return "up"
        return "none"


def crot(target: str, angle: float = math.pi, axis: float = 0.0) -> Gate:
    return Gate("CROT", target, angle, axis)


def zcrot(target: str, angle: float = math.pi, axis: float = 0.0) -> Gate:
    return Gate("zCROT", target, angle, axis)


def x90(target: str) -> Gate:
    return Gate("X90", target, math.pi / 2, 0.0)


def y90(target: str) -> Gate:
    return Gate("Y90", target, math.pi / 2, math.pi / 2)


def idle() -> Gate:
    return Gate("Idle", None, 0.0, 0.0)


def gate_duration(gate: Gate, rabi: float = DEFAULT_RABI_MHZ) -> float:
    """Duration in microseconds; Idle lasts one pi/2 pulse."""
    if gate.kind == "Idle":
        return (math.pi / 2) / (2.0 * math.pi * rabi)
    if gate.kind in COMPOSITE_KINDS:
        return 2.0 * abs(gate.angle) / (2.0 * math.pi * rabi)
    return abs(gate.angle) / (2.0 * math.pi * rabi)


def _level_map(params: SpinSystemParams, nucs: NuclearConfig):
    sol = eigenstates(params, nucs)
    labels = _dominant_labels(sol.states)
    level_of = {lab: k for k, lab in enumerate(labels)}
    ups = np.array([lab.count("u") for lab in labels])
    return sol, level_of, ups


def _block_levels(level_of, target: str, control: str) -> tuple[int, int]:
    """(lower, upper) level indices for a conditional rotation block."""
    c = "d" if control == "down" else "u"
    if target == "Q1":
        return level_of["d" + c], level_of["u" + c]
    return level_of[c + "d"], level_of[c + "u"]


def _block_rotation(angle: float, axis: float) -> np.ndarray:
    """2x2 rotation about cos(axis) X + sin(axis) Y, basis (upper, lower)."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array(
        [[c, -1j * s * np.exp(-1j * axis)], [-1j * s * np.exp(1j * axis), c]]
    )


def native_gate(
    params: SpinSystemParams,
    gate: Gate,
    nucs: NuclearConfig = NuclearConfig(),
) -> np.ndarray:
    """Ideal 4x4 unitary of a native conditional rotation or idle.

    The rotation block is embedded in the eigenbasis of the effective
    Hamiltonian, expressed back in the product basis, with identity on the
    two spectator levels. For composite kinds use `unconditional_gate`.
    """
    if gate.kind == "Idle":
        return np.eye(4, dtype=complex)
    if gate.kind in COMPOSITE_KINDS:
        raise ValueError(
            f"{gate.kind} is a composite gate; expand it with unconditional_gate"
        )
    sol, level_of, _ = _level_map(params, nucs)
    lo, hi = _block_levels(level_of, gate.target, gate.control)
    u_eig = np.eye(4, dtype=complex)
    block = _block_rotation(gate.angle, gate.axis)
    u_eig[np.ix_([hi, lo], [hi, lo])] = block
    v = sol.states
    return v @ u_eig @ v.conj().T


def unconditional_gate(
    params: SpinSystemParams,
    target: str,
    angle: float = math.pi / 2,
    axis: float = 0.0,
) -> list[Gate]:
    """Unconditional rotation as two sequential conditional rotations.

    The target is rotated first with the other electron down, then with it
    up; the two blocks are disjoint, so for ideal gates the composition
    equals the plain single-qubit rotation on the target.
    """
    return [
        Gate("CROT", target, angle, axis),
        Gate("zCROT", target, angle, axis),
    ]


def expand_gate(gate: Gate) -> list[Gate]:
    if gate.kind in COMPOSITE_KINDS:
        return [
            Gate("CROT", gate.target, gate.angle, gate.axis),
            Gate("zCROT", gate.target, gate.angle, gate.axis),
        ]
    return [gate]


def pulse_for_gate(
    params: SpinSystemParams,
    gate: Gate,
    rabi: float = DEFAULT_RABI_MHZ,
    start: float = 0.0,
    nucs: NuclearConfig = NuclearConfig(),
) -> PulseSpec:
    """Resonant square pulse realizing one native conditional rotation."""
    if gate.kind not in ("CROT", "zCROT"):
        raise ValueError("only conditional rotations map to single pulses")
    sol, level_of, _ = _level_map(params, nucs)
    lo, hi = _block_levels(level_of, gate.target, gate.control)
    freq = sol.energies[hi] - sol.energies[lo]
    duration = abs(gate.angle) / (2.0 * math.pi * rabi)
    return PulseSpec(
        frequency=freq, duration=duration, rabi=rabi, phase=gate.axis, start=start
    )


def _drive_operator(params: SpinSystemParams, nucs: NuclearConfig):
    """Drive matrix in the eigenbasis and per-level up-spin counts."""
    sol, level_of, ups = _level_map(params, nucs)
    d_prod = _site_op(SX, 0, 2) + _site_op(SX, 1, 2)
    d_eig = sol.states.conj().T @ d_prod @ sol.states
    return sol, level_of, ups, np.real(d_eig)


def propagate_pulse(
    params: SpinSystemParams,
    pulse: PulseSpec,
    nucs: NuclearConfig = NuclearConfig(),
    mode: str = "rwa",
) -> np.ndarray:
    """Propagator of one pulse in the interaction picture (4x4 unitary).

    mode='rwa' integrates the time-independent rotating-frame Hamiltonian
    (all four lines kept with their detunings, counter-rotating terms
    dropped) in closed form. mode='exact' integrates the lab-frame
    Hamiltonian piecewise with steps of at most 1/(50 * carrier), using the
    exact within-step average of the drive envelope; it is slow and meant
    for validating the RWA on scaled-down systems.

    The drive amplitude is calibrated so the line nearest the carrier has
    on-resonance Rabi frequency pulse.rabi.
    """
    sol, level_of, ups, d_eig = _drive_operator(params, nucs)
    energies = sol.energies
    f = pulse.frequency

    # single-flip pairs (upper, lower) and the addressed one
    pairs = []
    for hi in range(4):
        for lo in range(4):
            if ups[hi] == ups[lo] + 1 and abs(d_eig[hi, lo]) > 1e-12:
                pairs.append((hi, lo))
    if not pairs:
        raise ValueError("drive couples no transitions")
    detunings = {p: energies[p[0]] - energies[p[1]] - f for p in pairs}
    addressed = min(pairs, key=lambda p: abs(detunings[p]))
    m_addr = abs(d_eig[addressed])
    omega = pulse.rabi / (2.0 * m_addr)

    if mode == "rwa":
        delta = energies - f * ups
        h_rot = np.diag(delta.astype(complex))
        for hi, lo in pairs:
            coupling = omega * d_eig[hi, lo]
            h_rot[hi, lo] += coupling * np.exp(-1j * pulse.phase)
            h_rot[lo, hi] += coupling * np.exp(1j * pulse.phase)
        u_rot = _expm_herm(h_rot, pulse.duration)
        t0, t1 = pulse.start, pulse.start + pulse.duration
        pre = np.exp(2j * np.pi * delta * t1)
        post = np.exp(-2j * np.pi * delta * t0)
        u_eig = (pre[:, None] * u_rot) * post[None, :]
    elif mode == "exact":
        u_eig = _propagate_exact(energies, d_eig, omega, pulse)
    else:
        raise ValueError(f"unknown propagation mode {mode!r}")

    v = sol.states
    return v @ u_eig @ v.conj().T


def _expm_herm(h: np.ndarray, t: float) -> np.ndarray:
    """expm(-2 pi i H t) for Hermitian H (frequencies in MHz, t in us)."""
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-2j * np.pi * evals * t)
    return (evecs * phases) @ evecs.conj().T


def _propagate_exact(
    energies: np.ndarray, d_eig: np.ndarray, omega: float, pulse: PulseSpec
) -> np.ndarray:
    h0 = np.diag(energies.astype(complex))
    f = pulse.frequency
    dt_max = 1.0 / (50.0 * f)
    n_steps = max(1, int(math.ceil(pulse.duration / dt_max)))
    dt = pulse.duration / n_steps
    t0 = pulse.start

    # exact average of 2 cos(2 pi f t + phi) over each step (first Magnus
    # term exact; residual error is the commutator term, O(dt^3) per step)
    edges = t0 + dt * np.arange(n_steps + 1)
    sins = np.sin(2.0 * np.pi * f * edges + pulse.phase)
    avg = (sins[1:] - sins[:-1]) / (np.pi * f * dt)

    u = np.eye(4, dtype=complex)
    for cbar in avg:
        h = h0 + (omega * cbar) * d_eig
        u = _expm_herm(h, dt) @ u

    t1 = t0 + pulse.duration
    pre = np.exp(2j * np.pi * energies * t1)
    post = np.exp(-2j * np.pi * energies * t0)
    return (pre[:, None] * u) * post[None, :]


@dataclass(frozen=True)
class CircuitNoise:
    """Markovian per-gate noise attached to circuit application.

    t1 and t2 are relaxation / pure-dephasing times in microseconds applied
    to both electrons for each gate's duration; depol_rate is an inverse
    time for a single-qubit depolarizing channel on the target (both qubits
    for Idle); control_dephasing is a per-gate phase-flip probability on the
    control electron of each conditional rotation.
    """

    t1: float = math.inf
    t2: float = math.inf
    depol_rate: float = 0.0
    control_dephasing: float = 0.0

    def kraus_after(self, gate: Gate, duration: float) -> list[list[np.ndarray]]:
        ops: list[list[np.ndarray]] = []
        for q in (0, 1):
            if math.isfinite(self.t1):
                ops.append(superop.lift_kraus(superop.channel("T1", 1.0 / self.t1, duration), q))
            if math.isfinite(self.t2):
                ops.append(superop.lift_kraus(superop.channel("T2", 1.0 / self.t2, duration), q))
        if self.depol_rate > 0.0:
            targets = (0, 1) if gate.target is None else (0 if gate.target == "Q1" else 1,)
            for q in targets:
                ops.append(
                    superop.lift_kraus(
                        superop.channel("depolarizing", self.depol_rate, duration), q
                    )
                )
        if self.control_dephasing > 0.0 and gate.kind in ("CROT", "zCROT"):
            control_q = 1 if gate.target == "Q1" else 0
            ops.append(
                superop.lift_kraus(
                    superop.dephasing_kraus(self.control_dephasing), control_q
                )
            )
        return ops


def apply_circuit(
    rho: np.ndarray,
    circuit: list[Gate],
    params: SpinSystemParams = SpinSystemParams(),
    noise: CircuitNoise | None = None,
    rabi: float = DEFAULT_RABI_MHZ,
    mode: str = "ideal",
    nucs: NuclearConfig = NuclearConfig(),
    start: float = 0.0,
) -> np.ndarray:
    """Apply a gate sequence to a density matrix.

    mode='ideal' uses the embedded-rotation unitaries; mode='pulse' builds
    each conditional rotation from its resonant RWA pulse (composite gates
    are expanded first in both modes). Noise channels, when given, follow
    each gate for that gate's duration. Wall-clock time advances by each
    gate's duration starting from `start` (pulse mode needs it for frame
    phases).
    """
    rho = np.asarray(rho, dtype=complex)
    t = start
    for top_gate in circuit:
        for gate in expand_gate(top_gate):
            duration = gate_duration(gate, rabi)
            if gate.kind == "Idle":
                u = np.eye(4, dtype=complex)
            elif mode == "ideal":
                u = native_gate(params, gate, nucs)
            elif mode == "pulse":
                pulse = pulse_for_gate(params, gate, rabi, start=t, nucs=nucs)
                u = propagate_pulse(params, pulse, nucs)
            else:
                raise ValueError(f"unknown circuit mode {mode!r}")
            rho = u @ rho @ u.conj().T
            if noise is not None:
                for kraus in noise.kraus_after(gate, duration):
                    rho = superop.apply_kraus(rho, kraus)
            t += duration
    return rho


def circuit_unitary(
    circuit: list[Gate],
    params: SpinSystemParams = SpinSystemParams(),
    nucs: NuclearConfig = NuclearConfig(),
) -> np.ndarray:
    """Ideal composite unitary of a circuit (expanding composite gates)."""
    u = np.eye(4, dtype=complex)
    for top_gate in circuit:
        for gate in expand_gate(top_gate):
            if gate.kind == "Idle":
                continue
            u = native_gate(params, gate, nucs) @ u
    return u


def bell_prep_circuit() -> list[Gate]:
    """Two-gate circuit preparing Phi+ from |dd>: a pi/2 rotation on Q1
    (acting on the control-down block, which is the whole population) and a
    conditional pi rotation on Q2 given Q1 up. Both pulses use axis +Y; with
    X-axis pulses the same circuit yields Phi-.
    """
    return [
        Gate("CROT", "Q1", math.pi / 2, math.pi / 2),
        Gate("zCROT", "Q2", math.pi, math.pi / 2),
    ]


def reversed_circuit(circuit: list[Gate], phase: float) -> list[Gate]:
    """Undo a circuit: inverses in reverse order, axes shifted by phase.

    The inverse of a rotation by angle about axis a is the same angle about
    a + pi; the reversal phase adds on top of that.
    """
    out = []
    for gate in reversed(circuit):
        if gate.kind == "Idle":
            out.append(gate)
        else:
            out.append(replace(gate, axis=gate.axis + math.pi + phase))
    return out
