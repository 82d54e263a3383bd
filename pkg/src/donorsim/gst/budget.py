"""Error budgets: decomposing estimated gates into named error channels.

Each gate's error generator L = log(G_est @ inv(G_target)) is projected
onto the Hamiltonian basis (coherent errors, radians) and the Pauli
stochastic basis (incoherent rates). Coherent rates split further into
the component along the target's own rotation axis (over/under-rotation)
and the perpendicular remainder (axis misalignment). For the idle gate,
whose target generator vanishes, the phase axis plays the role of the
rotation axis: Z-type Pauli components count as phase accumulation and
everything perpendicular to them as misalignment.

Fidelities: average gate fidelity comes from the entanglement fidelity
trace formula; the generator fidelity is rebuilt from the projected
rates alone (exponentials of the Hamiltonian part and stochastic part
separately), so reported coherent and incoherent infidelities sum to the
generator infidelity by construction and match the total infidelity to
linearization order.

Relational axis misalignment compares the full rotation generators of
two gates: the angle between their Hamiltonian axes minus the nominal
angle (pi/2 for an X/Y pair). It is invariant under any global unitary
frame rotation applied to both gates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..superop import is_completely_positive
from .estimate import ErrorBasis, build_error_basis, params_from_gate
from .gatesets import GateSet

_BRANCH_LIMIT = np.pi / 2


@dataclass(frozen=True)
class FidelityReport:
    average: float
    entanglement: float
    generator: float

    @property
    def infidelity(self) -> float:
        return 1.0 - self.average


@dataclass(frozen=True)
class GateBudget:
    label: str
    hamiltonian: dict[str, float]
    stochastic: dict[str, float]
    residual: float
    over_rotation: float
    axis_misalignment: float
    dephasing: float
    depolarization: float
    infidelity: float
    coherent_infidelity: float
    incoherent_infidelity: float
    generator_fidelity: float
    warning: str | None = None

    @property
    def incoherent_fraction(self) -> float:
        split = self.coherent_infidelity + self.incoherent_infidelity
        if split <= 0.0:
            return 0.0
        return self.incoherent_infidelity / split


@dataclass(frozen=True)
class ErrorBudget:
    gates: dict[str, GateBudget]
    relational_misalignment: dict[tuple[str, str], float]


def entanglement_fidelity(gate: np.ndarray, target: np.ndarray) -> float:
    dim = gate.shape[0]
    return float(np.trace(target.T @ gate)) / dim


def average_fidelity(gate: np.ndarray, target: np.ndarray) -> float:
    d = int(round(np.sqrt(gate.shape[0])))
    return (d * entanglement_fidelity(gate, target) + 1.0) / (d + 1.0)


def _avg_from_ent(f_ent: float, d: int) -> float:
    return (d * f_ent + 1.0) / (d + 1.0)


def _split_infidelities(
    h: np.ndarray, s: np.ndarray, basis: ErrorBasis, d: int
) -> tuple[float, float]:
    dim = (d * d)
    gen_h = np.tensordot(h, basis.hamiltonian, axes=1)
    gen_s = np.tensordot(s, basis.stochastic, axes=1)
    f_coh = _avg_from_ent(float(np.trace(scipy.linalg.expm(gen_h))) / dim, d)
    f_inc = _avg_from_ent(float(np.trace(scipy.linalg.expm(gen_s))) / dim, d)
    return 1.0 - f_coh, 1.0 - f_inc


def fidelity(
    gate_est: np.ndarray,
    gate_target: np.ndarray,
    basis: ErrorBasis | None = None,
    cp_atol: float = 1e-8,
) -> FidelityReport:
    """Average, entanglement, and generator fidelity of one gate.

    Both inputs must be completely positive; a non-CP matrix raises.
    """
    for name, g in (("estimate", gate_est), ("target", gate_target)):
        if not is_completely_positive(g, atol=cp_atol):
            raise ValueError(f"{name} gate is not completely positive")
    d = int(round(np.sqrt(gate_est.shape[0])))
    basis = basis or build_error_basis(int(round(np.log2(d))))
    f_ent = entanglement_fidelity(gate_est, gate_target)
    h, s, _ = params_from_gate(gate_est, gate_target, basis)
    coh, inc = _split_infidelities(h, s, basis, d)
    return FidelityReport(
        average=_avg_from_ent(f_ent, d),
        entanglement=f_ent,
        generator=1.0 - coh - inc,
    )


def hamiltonian_axis(gate: np.ndarray, basis: ErrorBasis) -> tuple[np.ndarray, float]:
    """Rotation axis (unit vector over Pauli rates) and angle of a gate.

    Uses the full generator log(G), not the error generator, so the axis
    describes the actual rotation the gate implements.
    """
    gen = np.real(scipy.linalg.logm(gate))
    h = np.tensordot(basis.hamiltonian, gen, axes=([1, 2], [0, 1]))
    h /= basis.hamiltonian_norms
    angle = float(np.linalg.norm(h))
    if angle < 1e-12:
        raise ValueError("gate has no resolvable rotation axis")
    return h / angle, angle


def relational_misalignment(
    gate_a: np.ndarray,
    gate_b: np.ndarray,
    basis: ErrorBasis,
    expected: float = np.pi / 2,
) -> float:
    """Angle between two gates' rotation axes minus the nominal angle."""
    axis_a, _ = hamiltonian_axis(gate_a, basis)
    axis_b, _ = hamiltonian_axis(gate_b, basis)
    angle = float(np.arccos(np.clip(axis_a @ axis_b, -1.0, 1.0)))
    return angle - expected


def _phase_axis_mask(basis: ErrorBasis) -> np.ndarray:
    return np.array([set(lbl) <= {"I", "Z"} for lbl in basis.labels])


def _target_axis(target: np.ndarray, basis: ErrorBasis) -> np.ndarray | None:
    gen = np.real(scipy.linalg.logm(target))
    h = np.tensordot(basis.hamiltonian, gen, axes=([1, 2], [0, 1]))
    h /= basis.hamiltonian_norms
    norm = float(np.linalg.norm(h))
    if norm < 1e-9:
        return None
    return h / norm


def gate_budget(
    gate_est: np.ndarray,
    gate_target: np.ndarray,
    basis: ErrorBasis,
    label: str = "",
) -> GateBudget:
    h, s, residual = params_from_gate(gate_est, gate_target, basis)
    d = int(round(np.sqrt(gate_est.shape[0])))
    axis = _target_axis(gate_target, basis)
    if axis is None:
        mask = _phase_axis_mask(basis)
        parallel = np.where(mask, h, 0.0)
        perp = np.where(mask, 0.0, h)
        over = float(np.linalg.norm(parallel))
        if np.count_nonzero(mask) == 1:
            over = float(parallel[mask][0])
    else:
        over = float(h @ axis)
        perp = h - over * axis
    misalignment = float(np.linalg.norm(perp))
    coh, inc = _split_infidelities(h, s, basis, d)
    total = 1.0 - average_fidelity(gate_est, gate_target)
    rotation_error = float(np.linalg.norm(h))
    warning = None
    if rotation_error > _BRANCH_LIMIT:
        warning = (
            f"rotation error {rotation_error:.3f} rad exceeds pi/2; principal "
            "logarithm branch may misattribute the coherent error"
        )
    return GateBudget(
        label=label,
        hamiltonian={lbl: float(v) for lbl, v in zip(basis.labels, h)},
        stochastic={lbl: float(v) for lbl, v in zip(basis.labels, s)},
        residual=residual,
        over_rotation=over,
        axis_misalignment=misalignment,
        dephasing=float(np.max(s) - np.min(s)),
        depolarization=float(np.min(s)),
        infidelity=total,
        coherent_infidelity=coh,
        incoherent_infidelity=inc,
        generator_fidelity=1.0 - coh - inc,
        warning=warning,
    )


def _xy_pairs(labels: tuple[str, ...]) -> list[tuple[str, str]]:
    pairs = []
    for lbl in labels:
        if lbl.startswith("Gx"):
            partner = "Gy" + lbl[2:]
            if partner in labels:
                pairs.append((lbl, partner))
    return pairs


def error_budget(estimate_gauged: GateSet, target: GateSet) -> ErrorBudget:
    """Per-gate error decomposition plus X/Y relational misalignments."""
    basis = build_error_basis(target.n_qubits)
    gates = {
        lbl: gate_budget(estimate_gauged.gates[lbl], target.gates[lbl], basis, lbl)
        for lbl in target.labels
    }
    relational = {
        pair: relational_misalignment(
            estimate_gauged.gates[pair[0]], estimate_gauged.gates[pair[1]], basis
        )
        for pair in _xy_pairs(target.labels)
    }
    return ErrorBudget(gates=gates, relational_misalignment=relational)
