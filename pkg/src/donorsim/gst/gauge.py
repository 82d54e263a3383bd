"""Gauge freedom handling for estimated gate sets.

A gate set estimate is only defined up to an invertible frame change
T: rho -> T rho, E^T -> E^T T^-1, G -> T G T^-1, which leaves every
circuit probability untouched. With preparation and measurement both
diagonal in the computational basis, rotations about the Z axes in
particular are invisible to the data, so error amplitudes can appear
smeared across gates until a frame is fixed. This module fixes it by
searching the unitary gauge group (orthogonal transfer matrices,
generated by the Hamiltonian basis) for the frame closest to the target
gate set in Frobenius norm, with a small weight tying down SPAM.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.optimize

from .estimate import ErrorBasis, build_error_basis
from .gatesets import GateSet


def gauge_transform_matrix(h: np.ndarray, basis: ErrorBasis) -> np.ndarray:
    """Orthogonal PTM of the gauge unitary generated by h."""
    return scipy.linalg.expm(np.tensordot(h, basis.hamiltonian, axes=1))


def apply_gauge(gateset: GateSet, transform: np.ndarray) -> GateSet:
    """Frame change by an orthogonal transform (T^-1 = T^T)."""
    out = gateset.copy()
    out.gates = {g: transform @ m @ transform.T for g, m in gateset.gates.items()}
    out.rho = transform @ gateset.rho
    out.effects = {e: transform @ v for e, v in gateset.effects.items()}
    return out


def gauge_optimize(
    gateset: GateSet,
    target: GateSet,
    spam_weight: float = 0.1,
    basis: ErrorBasis | None = None,
) -> tuple[GateSet, np.ndarray, float]:
    """Rotate the estimate into the frame nearest the target.

    Returns (transformed gate set, gauge generator coefficients, final
    objective value). The objective is the summed squared Frobenius
    distance over gates plus spam_weight times the SPAM distance.
    """
    basis = basis or build_error_basis(gateset.n_qubits)
    labels = gateset.labels

    def objective(h: np.ndarray) -> float:
        t_mat = gauge_transform_matrix(h, basis)
        cost = 0.0
        for g in labels:
            delta = t_mat @ gateset.gates[g] @ t_mat.T - target.gates[g]
            cost += float(np.sum(delta * delta))
        d_rho = t_mat @ gateset.rho - target.rho
        cost += spam_weight * float(d_rho @ d_rho)
        for e, v in gateset.effects.items():
            d_e = t_mat @ v - target.effects[e]
            cost += spam_weight * float(d_e @ d_e)
        return cost

    x0 = np.zeros(len(basis.labels))
    result = scipy.optimize.minimize(objective, x0, method="BFGS",
                                     options={"gtol": 1e-10, "maxiter": 500})
    t_mat = gauge_transform_matrix(result.x, basis)
    return apply_gauge(gateset, t_mat), result.x, float(result.fun)
