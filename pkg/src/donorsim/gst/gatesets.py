"""Gate sets in the Pauli transfer representation.

A gate set bundles the gates (real PTMs over the normalized Pauli basis),
the preparation (Pauli vector of the starting state) and the measurement
effects (Pauli vectors of the POVM elements). Probabilities of a gate
sequence are row-vector / matrix / column-vector contractions, so all of
GST works on real linear algebra.

The single-qubit set holds {Gi, Gx, Gy} acting on one electron initialized
down and measured up/down. The two-qubit set holds the global idle plus
conditional x/y 90-degree rotations for each of the four (target, control
state) configurations, matching the native conditional rotations of the
exchange-coupled pair; preparation is down-down and the measurement is the
joint single-shot electron readout with four outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import superop

SQ2 = math.sqrt(2.0)

_P_UP = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
_P_DOWN = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)

ONE_QUBIT_LABELS = ("Gi", "Gx", "Gy")

CONDITIONAL_CONFIGS = (
    ("q1", 0),
    ("q1", 1),
    ("q2", 0),
    ("q2", 1),
)

TWO_QUBIT_LABELS = ("Gi",) + tuple(
    f"G{axis}_{target}c{control}"
    for target, control in CONDITIONAL_CONFIGS
    for axis in ("x", "y")
)


def rotation_unitary(angle: float, axis: float) -> np.ndarray:
    """Single-qubit rotation by `angle` about the equatorial axis `axis`."""
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    return np.array(
        [
            [c, -1j * s * np.exp(-1j * axis)],
            [-1j * s * np.exp(1j * axis), c],
        ],
        dtype=complex,
    )


def conditional_unitary(
    target: str, control_state: int, angle: float, axis: float
) -> np.ndarray:
    """Two-qubit unitary rotating `target` when the other electron is in
    `control_state` (0 = down, 1 = up); identity on the other branch."""
    r = rotation_unitary(angle, axis)
    sel = _P_UP if control_state == 1 else _P_DOWN
    rest = _P_DOWN if control_state == 1 else _P_UP
    if target == "q1":
        return np.kron(r, sel) + np.kron(np.eye(2), rest)
    if target == "q2":
        return np.kron(sel, r) + np.kron(rest, np.eye(2))
    raise ValueError("target must be 'q1' or 'q2'")


def parse_label(label: str) -> dict:
    """Structure of a two-qubit conditional gate label."""
    if label == "Gi":
        return {"kind": "idle"}
    axis_char, rest = label[1], label.split("_", 1)[1]
    target, control = rest.split("c")
    return {
        "kind": "conditional",
        "axis": 0.0 if axis_char == "x" else math.pi / 2.0,
        "target": target,
        "control_state": int(control),
    }


@dataclass
class GateSet:
    """Gates, preparation, and measurement in the PTM representation."""

    gates: dict[str, np.ndarray]
    rho: np.ndarray
    effects: dict[str, np.ndarray]
    n_qubits: int
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 4**self.n_qubits

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.gates)

    @property
    def outcome_labels(self) -> tuple[str, ...]:
        return tuple(self.effects)

    def effect_matrix(self) -> np.ndarray:
        """(n_outcomes, dim) stack of effect Pauli vectors."""
        return np.stack([self.effects[o] for o in self.effects])

    def gate_stack(self) -> np.ndarray:
        """(n_gates, dim, dim) stack in label order."""
        return np.stack([self.gates[g] for g in self.gates])

    def probabilities(self, circuit: tuple[str, ...]) -> np.ndarray:
        """Outcome probabilities of prep -> circuit -> measurement."""
        v = self.rho.copy()
        for label in circuit:
            v = self.gates[label] @ v
        return self.effect_matrix() @ v

    def copy(self) -> "GateSet":
        return GateSet(
            gates={k: v.copy() for k, v in self.gates.items()},
            rho=self.rho.copy(),
            effects={k: v.copy() for k, v in self.effects.items()},
            n_qubits=self.n_qubits,
            meta=dict(self.meta),
        )


def _spam_one_qubit() -> tuple[np.ndarray, dict[str, np.ndarray]]:
    rho = superop.pauli_vector(_P_DOWN)
    effects = {
        "u": superop.effect_pauli_vector(_P_UP),
        "d": superop.effect_pauli_vector(_P_DOWN),
    }
    return rho, effects


def _spam_two_qubit() -> tuple[np.ndarray, dict[str, np.ndarray]]:
    rho = superop.pauli_vector(np.kron(_P_DOWN, _P_DOWN))
    effects = {}
    for o1, p1 in (("u", _P_UP), ("d", _P_DOWN)):
        for o2, p2 in (("u", _P_UP), ("d", _P_DOWN)):
            effects[o1 + o2] = superop.effect_pauli_vector(np.kron(p1, p2))
    return rho, effects


def target_gateset(n_qubits: int) -> GateSet:
    """Ideal gate set: 3 gates for one qubit, 9 (8 conditional + idle)
    for the exchange-coupled pair."""
    if n_qubits == 1:
        gates = {
            "Gi": np.eye(4),
            "Gx": superop.ptm_from_unitary(rotation_unitary(math.pi / 2.0, 0.0)),
            "Gy": superop.ptm_from_unitary(
                rotation_unitary(math.pi / 2.0, math.pi / 2.0)
            ),
        }
        rho, effects = _spam_one_qubit()
        return GateSet(gates=gates, rho=rho, effects=effects, n_qubits=1)
    if n_qubits == 2:
        gates = {"Gi": np.eye(16)}
        for label in TWO_QUBIT_LABELS[1:]:
            info = parse_label(label)
            u = conditional_unitary(
                info["target"], info["control_state"], math.pi / 2.0, info["axis"]
            )
            gates[label] = superop.ptm_from_unitary(u)
        rho, effects = _spam_two_qubit()
        return GateSet(gates=gates, rho=rho, effects=effects, n_qubits=2)
    raise ValueError("only 1- and 2-qubit gate sets are defined")
