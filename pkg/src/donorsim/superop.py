"""Superoperator representations and standard noise channels.

Conventions (shared by the tomography and gate-set estimation code):

* vec() stacks columns, so vec(A X B) = (B^T kron A) vec(X).
* Pauli transfer matrices (PTMs) are real d^2 x d^2 matrices over the
  normalized Pauli basis B_i = P_i / sqrt(d); M[i, j] = tr(B_i E(B_j)).
  Trace preservation means the first row is (1, 0, ..., 0).
* The Choi matrix is sum_k vec(K_k) vec(K_k)^dagger (trace d for a
  trace-preserving channel); complete positivity means it is PSD.
"""

from __future__ import annotations

from functools import lru_cache, reduce
from itertools import product

import numpy as np

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def vec(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((d, d), order="F")


@lru_cache(maxsize=None)
def pauli_labels(n_qubits: int) -> tuple[str, ...]:
    return tuple("".join(p) for p in product("IXYZ", repeat=n_qubits))


@lru_cache(maxsize=None)
def pauli_basis(n_qubits: int) -> tuple[np.ndarray, ...]:
    """Unnormalized Pauli operators ordered like pauli_labels."""
    mats = []
    for label in pauli_labels(n_qubits):
        mats.append(reduce(np.kron, (PAULI_1Q[c] for c in label)))
    return tuple(mats)


@lru_cache(maxsize=None)
def _pauli_change_of_basis(n_qubits: int) -> np.ndarray:
    """Columns are vec(P_i / sqrt(d)); unitary as a matrix."""
    d = 2**n_qubits
    cols = [vec(p) / np.sqrt(d) for p in pauli_basis(n_qubits)]
    return np.column_stack(cols)


def superop_from_kraus(kraus: list[np.ndarray]) -> np.ndarray:
    return sum(np.kron(k.conj(), k) for k in kraus)


def superop_from_ptm(ptm: np.ndarray) -> np.ndarray:
    n = int(round(np.log2(np.sqrt(ptm.shape[0]))))
    w = _pauli_change_of_basis(n)
    return w @ ptm.astype(complex) @ w.conj().T


def ptm_from_superop(superop: np.ndarray) -> np.ndarray:
    n = int(round(np.log2(np.sqrt(superop.shape[0]))))
    w = _pauli_change_of_basis(n)
    ptm = w.conj().T @ superop @ w
    return np.real_if_close(ptm, tol=1e6).real


def ptm_from_kraus(kraus: list[np.ndarray]) -> np.ndarray:
    return ptm_from_superop(superop_from_kraus(kraus))


def ptm_from_unitary(u: np.ndarray) -> np.ndarray:
    return ptm_from_kraus([np.asarray(u, dtype=complex)])


def choi_from_kraus(kraus: list[np.ndarray]) -> np.ndarray:
    return sum(np.outer(vec(k), vec(k).conj()) for k in kraus)


def choi_from_superop(superop: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(superop.shape[0])))
    s4 = superop.reshape(d, d, d, d)
    return s4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


def choi_from_ptm(ptm: np.ndarray) -> np.ndarray:
    return choi_from_superop(superop_from_ptm(ptm))


def pauli_vector(rho: np.ndarray) -> np.ndarray:
    """Coordinates of a state over the normalized Pauli basis."""
    n = int(round(np.log2(rho.shape[0])))
    w = _pauli_change_of_basis(n)
    return np.real_if_close(w.conj().T @ vec(rho), tol=1e6).real


def state_from_pauli_vector(r: np.ndarray) -> np.ndarray:
    n = int(round(np.log2(np.sqrt(r.size))))
    w = _pauli_change_of_basis(n)
    return unvec(w @ r.astype(complex))


def effect_pauli_vector(effect: np.ndarray) -> np.ndarray:
    """Row coordinates of a POVM effect: p = e . M . r."""
    return pauli_vector(effect)


def apply_kraus(rho: np.ndarray, kraus: list[np.ndarray]) -> np.ndarray:
    return sum(k @ rho @ k.conj().T for k in kraus)


def apply_ptm(ptm: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return state_from_pauli_vector(ptm @ pauli_vector(rho))


def is_trace_preserving(ptm: np.ndarray, atol: float = 1e-10) -> bool:
    first = np.zeros(ptm.shape[1])
    first[0] = 1.0
    return bool(np.allclose(ptm[0], first, atol=atol))


def is_completely_positive(ptm: np.ndarray, atol: float = 1e-8) -> bool:
    choi = choi_from_ptm(ptm)
    eigs = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    return bool(eigs.min() >= -atol)


def kraus_is_trace_preserving(kraus: list[np.ndarray], atol: float = 1e-10) -> bool:
    d = kraus[0].shape[0]
    acc = sum(k.conj().T @ k for k in kraus)
    return bool(np.allclose(acc, np.eye(d), atol=atol))


# --- standard single-qubit channels (basis order: up = 0, down = 1) ---


def amplitude_damping_kraus(p: float) -> list[np.ndarray]:
    """Relaxation of |up> toward |down> with probability p."""
    _check_prob(p)
    k0 = np.array([[np.sqrt(1.0 - p), 0.0], [0.0, 1.0]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [np.sqrt(p), 0.0]], dtype=complex)
    return [k0, k1]


def dephasing_kraus(p: float) -> list[np.ndarray]:
    """Phase flip with probability p; coherences shrink by (1 - 2p)."""
    _check_prob(p)
    return [np.sqrt(1.0 - p) * PAULI_1Q["I"], np.sqrt(p) * PAULI_1Q["Z"]]


def depolarizing_kraus(p: float) -> list[np.ndarray]:
    """rho -> (1 - p) rho + p I/2 on one qubit."""
    _check_prob(p)
    return [
        np.sqrt(1.0 - 0.75 * p) * PAULI_1Q["I"],
        np.sqrt(0.25 * p) * PAULI_1Q["X"],
        np.sqrt(0.25 * p) * PAULI_1Q["Y"],
        np.sqrt(0.25 * p) * PAULI_1Q["Z"],
    ]


def channel(kind: str, rate: float, duration: float) -> list[np.ndarray]:
    """Single-qubit Kraus channel for an exposure of the given duration.

    Parameterized so that composing two exposures equals one exposure of the
    summed duration (exponential semigroup):

    * 'T1': amplitude damping, p = 1 - exp(-duration * rate)
    * 'T2': pure dephasing, coherence factor exp(-duration * rate)
    * 'depolarizing': traceless part shrinks by exp(-duration * rate)

    `rate` is an inverse time (e.g. 1/T1); `duration` uses the same time
    unit. Zero rate or duration gives the identity channel.
    """
    if rate < 0 or duration < 0:
        raise ValueError("rate and duration must be non-negative")
    decay = np.exp(-rate * duration)
    if kind == "T1":
        return amplitude_damping_kraus(1.0 - decay)
    if kind == "T2":
        return dephasing_kraus(0.5 * (1.0 - decay))
    if kind == "depolarizing":
        return depolarizing_kraus(1.0 - decay)
    raise ValueError(f"unknown channel kind {kind!r}")


def lift_kraus(kraus: list[np.ndarray], qubit: int, n_qubits: int = 2) -> list[np.ndarray]:
    """Embed single-qubit Kraus operators on one qubit of a register."""
    if not 0 <= qubit < n_qubits:
        raise ValueError("qubit index out of range")
    out = []
    for k in kraus:
        factors = [np.eye(2, dtype=complex)] * n_qubits
        factors[qubit] = k
        out.append(reduce(np.kron, factors))
    return out


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
