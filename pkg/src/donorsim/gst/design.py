"""GST experiment designs: fiducials, germs, and the circuit list.

Circuits are tuples of gate labels, applied left to right between the
fixed preparation and measurement. The full list is
preparation fiducial + germ^power + measurement fiducial, deduplicated,
with the germ repeated floor(L / len(germ)) times (at least once) for
each maximum length L. The plain fiducial sandwiches (empty germ) and
every single-gate sandwich are always included; linear-inversion GST
reads exactly those.

Fiducials must be informationally complete: the prepared frames span the
d^2-dimensional Pauli space, checked by a rank test at design time. The
two-qubit fiducials build per-qubit {1, X90, Y90, X90^2} from the native
conditional rotations, an unconditional 90 being the two sequential
conditional rotations with opposite control states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gatesets import GateSet

Circuit = tuple[str, ...]

ONE_QUBIT_PREP_FIDUCIALS: tuple[Circuit, ...] = (
    (),
    ("Gx",),
    ("Gy",),
    ("Gx", "Gx"),
    ("Gx", "Gx", "Gx"),
    ("Gy", "Gy", "Gy"),
)

ONE_QUBIT_GERMS: tuple[Circuit, ...] = (
    ("Gx",),
    ("Gy",),
    ("Gi",),
    ("Gx", "Gy"),
    ("Gx", "Gy", "Gi"),
    ("Gx", "Gi", "Gy"),
    ("Gx", "Gi", "Gi"),
    ("Gy", "Gi", "Gi"),
    ("Gx", "Gx", "Gi", "Gy"),
    ("Gx", "Gy", "Gy", "Gi"),
    ("Gx", "Gx", "Gy", "Gx", "Gy", "Gy"),
)


def unconditional(axis: str, target: str) -> Circuit:
    """Unconditional 90-degree rotation: the two sequential conditionals."""
    return (f"G{axis}_{target}c0", f"G{axis}_{target}c1")


def two_qubit_fiducials() -> tuple[Circuit, ...]:
    """16 products of per-qubit {1, X90, Y90, X90 X90} frames."""
    x1, y1 = unconditional("x", "q1"), unconditional("y", "q1")
    x2, y2 = unconditional("x", "q2"), unconditional("y", "q2")
    per_q1: tuple[Circuit, ...] = ((), x1, y1, x1 + x1)
    per_q2: tuple[Circuit, ...] = ((), x2, y2, x2 + x2)
    return tuple(f1 + f2 for f1 in per_q1 for f2 in per_q2)


def two_qubit_germs(labels: tuple[str, ...]) -> tuple[Circuit, ...]:
    """Every gate as a singleton germ plus x-y alternations per config."""
    singles = tuple((g,) for g in labels)
    pairs = tuple(
        (f"Gx_{t}c{c}", f"Gy_{t}c{c}") for t in ("q1", "q2") for c in (0, 1)
    )
    return singles + pairs


@dataclass
class GSTDesign:
    prep_fiducials: tuple[Circuit, ...]
    meas_fiducials: tuple[Circuit, ...]
    germs: tuple[Circuit, ...]
    max_lengths: tuple[int, ...]
    circuits: list[Circuit] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.germs:
            raise ValueError("germ list must not be empty")
        if not self.circuits:
            self.circuits = _build_circuit_list(self)


def _build_circuit_list(design: GSTDesign) -> list[Circuit]:
    seen: dict[Circuit, None] = {}
    for fp in design.prep_fiducials:
        for fm in design.meas_fiducials:
            seen.setdefault(fp + fm, None)
    for germ in design.germs:
        for fp in design.prep_fiducials:
            for fm in design.meas_fiducials:
                seen.setdefault(fp + germ + fm, None)
                for length in design.max_lengths:
                    power = max(1, length // len(germ))
                    seen.setdefault(fp + germ * power + fm, None)
    return list(seen)


def fiducial_frame_rank(gateset: GateSet, fiducials: tuple[Circuit, ...]) -> int:
    """Rank of the span of fiducial-prepared states in Pauli space."""
    frame = []
    for fid in fiducials:
        v = gateset.rho.copy()
        for label in fid:
            v = gateset.gates[label] @ v
        frame.append(v)
    return int(np.linalg.matrix_rank(np.stack(frame), tol=1e-9))


def effect_frame_rank(gateset: GateSet, fiducials: tuple[Circuit, ...]) -> int:
    """Rank of the span of effects pulled back through each fiducial."""
    frame = []
    for fid in fiducials:
        stack = np.eye(gateset.dim)
        for label in fid:
            stack = gateset.gates[label] @ stack
        for effect in gateset.effects.values():
            frame.append(effect @ stack)
    return int(np.linalg.matrix_rank(np.stack(frame), tol=1e-9))


def design_gst(
    gateset: GateSet,
    max_lengths: tuple[int, ...] = (1, 2, 4),
    germs: tuple[Circuit, ...] | None = None,
    prep_fiducials: tuple[Circuit, ...] | None = None,
    meas_fiducials: tuple[Circuit, ...] | None = None,
) -> GSTDesign:
    """Standard design for the 1- or 2-qubit gate set.

    Raises when the fiducials fail the informational-completeness rank
    test or the germ list is empty.
    """
    if gateset.n_qubits == 1:
        prep = prep_fiducials or ONE_QUBIT_PREP_FIDUCIALS
        meas = meas_fiducials or ONE_QUBIT_PREP_FIDUCIALS
        germ_list = germs or ONE_QUBIT_GERMS
    else:
        prep = prep_fiducials or two_qubit_fiducials()
        meas = meas_fiducials or two_qubit_fiducials()
        germ_list = germs or two_qubit_germs(gateset.labels)
    dim = gateset.dim
    rank = fiducial_frame_rank(gateset, prep)
    if rank < dim:
        raise ValueError(
            f"preparation fiducials span rank {rank} < {dim}; not informationally complete"
        )
    rank_m = effect_frame_rank(gateset, meas)
    if rank_m < dim:
        raise ValueError(
            f"measurement fiducials span rank {rank_m} < {dim}; not informationally complete"
        )
    return GSTDesign(
        prep_fiducials=tuple(prep),
        meas_fiducials=tuple(meas),
        germs=tuple(germ_list),
        max_lengths=tuple(max_lengths),
    )
