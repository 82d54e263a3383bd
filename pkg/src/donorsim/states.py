"""State preparation helpers and density-matrix utilities."""

from __future__ import annotations

import numpy as np

from .spin import STATE_INDEX

BELL_LABELS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")


def ket(label: str) -> np.ndarray:
    """Two-electron product ket, e.g. ket('dd'); basis order (uu, ud, du, dd)."""
    vec = np.zeros(4, dtype=complex)
    vec[STATE_INDEX[label]] = 1.0
    return vec


def bell_state(label: str) -> np.ndarray:
    """Bell state vector; phi states live on (dd, uu), psi states on (ud, du)."""
    s = 1.0 / np.sqrt(2.0)
    if label == "phi_plus":
        return s * (ket("dd") + ket("uu"))
    if label == "phi_minus":
        return s * (ket("dd") - ket("uu"))
    if label == "psi_plus":
        return s * (ket("ud") + ket("du"))
    if label == "psi_minus":
        return s * (ket("ud") - ket("du"))
    raise ValueError(f"unknown Bell state {label!r}")


def density(state: np.ndarray) -> np.ndarray:
    """Pure-state density matrix from a ket."""
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def is_density_matrix(
    rho: np.ndarray, atol: float = 1e-9, require_psd: bool = True
) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if not np.allclose(rho, rho.conj().T, atol=atol):
        return False
    if abs(np.trace(rho).real - 1.0) > atol:
        return False
    if require_psd:
        eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if eigs.min() < -atol:
            return False
    return True


def _flip_channel(rho: np.ndarray, qubit: int, p: float) -> np.ndarray:
    """Independent bit flip with probability p on one qubit of two."""
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    op = np.kron(sx, np.eye(2)) if qubit == 0 else np.kron(np.eye(2), sx)
    return (1.0 - p) * rho + p * (op @ rho @ op.conj().T)


def initialize(
    spec: str | np.ndarray = "dd",
    prep_error: float | tuple[float, float] = 0.0,
) -> np.ndarray:
    """Initial two-electron density matrix.

    Args:
        spec: a product label ('dd', 'ud', ...), a Bell label ('phi_plus',
            ...), or an explicit normalized state vector of length 4.
        prep_error: probability of an independent bit flip on each qubit
            applied after the nominal preparation; a (p_q1, p_q2) pair
            gives each qubit its own rate.

    Returns:
        4x4 density matrix. For spec='dd' the diagonal populations are
        ((1-p)^2 on dd, p(1-p) on each single flip, p^2 on uu).
    """
    p1, p2 = (
        prep_error if isinstance(prep_error, tuple) else (prep_error, prep_error)
    )
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
        raise ValueError("prep_error must be a probability")
    if isinstance(spec, str):
        if spec in STATE_INDEX:
            vec = ket(spec)
        elif spec in BELL_LABELS:
            vec = bell_state(spec)
        else:
            raise ValueError(f"unknown state spec {spec!r}")
    else:
        vec = np.asarray(spec, dtype=complex)
        if vec.shape != (4,):
            raise ValueError("state vector must have length 4")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("state vector must be normalized")
    rho = density(vec)
    if p1 > 0.0:
        rho = _flip_channel(rho, 0, p1)
    if p2 > 0.0:
        rho = _flip_channel(rho, 1, p2)
    return rho
