"""Single-shot electron readout and repetitive QND measurement.

Readout errors are classification errors: a shot first projects the
measured electron (Born rule), then the *record* is flipped with the
confusion probabilities. The default confusion (p(read up | up) = 0.74,
p(read up | down) = 0.26) reproduces a 0.48 single-shot contrast.

The QND scheme reads the data electron (Q2) through the ancilla (Q1):
each cycle loads Q1 fresh in down, applies a conditional pi rotation on Q1
given Q2 up, and measures Q1. Majority voting over an odd number of cycles
boosts the contrast; ties at even counts resolve to 'down'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from . import superop

P_UP_Q1 = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)  # Q1 up projector
P_UP_Q2 = np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex)  # Q2 up projector


@dataclass(frozen=True)
class ReadoutModel:
    """Electron readout confusion, identical for both electrons."""

    p_read_up_given_up: float = 0.74
    p_read_up_given_down: float = 0.26

    def __post_init__(self) -> None:
        for p in (self.p_read_up_given_up, self.p_read_up_given_down):
            if not 0.0 <= p <= 1.0:
                raise ValueError("confusion entries must be probabilities")
        if self.p_read_up_given_up <= self.p_read_up_given_down:
            raise ValueError("readout must distinguish up from down")

    @property
    def contrast(self) -> float:
        return self.p_read_up_given_up - self.p_read_up_given_down

    @property
    def confusion_matrix(self) -> np.ndarray:
        """2x2 map from physical (up, down) to recorded (up, down)."""
        pu, pd = self.p_read_up_given_up, self.p_read_up_given_down
        return np.array([[pu, pd], [1.0 - pu, 1.0 - pd]])


IDEAL_READOUT = ReadoutModel(1.0, 0.0)


def _projector(qubit: str) -> np.ndarray:
    if qubit == "Q1":
        return P_UP_Q1
    if qubit == "Q2":
        return P_UP_Q2
    raise ValueError(f"unknown qubit {qubit!r}")


def prob_physical_up(rho: np.ndarray, qubit: str) -> float:
    p = float(np.real(np.trace(_projector(qubit) @ rho)))
    return min(1.0, max(0.0, p))


def prob_read_up(rho: np.ndarray, qubit: str, model: ReadoutModel) -> float:
    """Probability that a shot records 'up', confusion included."""
    p = prob_physical_up(rho, qubit)
    return model.p_read_up_given_up * p + model.p_read_up_given_down * (1.0 - p)


def measure_electron(
    rho: np.ndarray,
    qubit: str,
    rng: np.random.Generator,
    model: ReadoutModel = ReadoutModel(),
) -> tuple[bool, np.ndarray]:
    """One destructive-record shot: (recorded up?, post-measurement state).

    The state collapses onto the physical outcome; only the record suffers
    the confusion flip.
    """
    proj_up = _projector(qubit)
    p_up = prob_physical_up(rho, qubit)
    physical_up = bool(rng.random() < p_up)
    proj = proj_up if physical_up else np.eye(4, dtype=complex) - proj_up
    weight = p_up if physical_up else 1.0 - p_up
    post = proj @ rho @ proj / weight if weight > 0 else rho
    p_record_up = (
        model.p_read_up_given_up if physical_up else model.p_read_up_given_down
    )
    record_up = bool(rng.random() < p_record_up)
    return record_up, post


def _reload_q1_down(rho: np.ndarray) -> np.ndarray:
    """Replace Q1 with a fresh down electron, keeping Q2's state."""
    rho4 = rho.reshape(2, 2, 2, 2)
    rho_q2 = np.trace(rho4, axis1=0, axis2=2)
    down = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    return np.kron(down, rho_q2)


_MAP_Q2_TO_Q1 = np.eye(4, dtype=complex)[:, [2, 1, 0, 3]]
# permutation uu<->du: flips Q1 exactly when Q2 is up (ideal logic-level
# conditional pi rotation used inside the readout cycle)


def qnd_readout(
    rho: np.ndarray,
    rng: np.random.Generator,
    model: ReadoutModel = ReadoutModel(),
    n_repeats: int = 11,
    t1_us: float = math.inf,
    cycle_duration_us: float = 10.0,
) -> tuple[bool, list[bool], np.ndarray]:
    """Repetitive QND readout of Q2 via Q1.

    Returns (majority vote on 'up', per-cycle records, post state). With
    finite t1_us, Q2 relaxes by amplitude damping for cycle_duration_us per
    cycle. Q2's Z populations are untouched by the cycle itself; only
    relaxation and the recorded collapse act on it.
    """
    if n_repeats < 1:
        raise ValueError("n_repeats must be at least 1")
    records: list[bool] = []
    for _ in range(n_repeats):
        rho = _reload_q1_down(rho)
        if math.isfinite(t1_us):
            kraus = superop.lift_kraus(
                superop.channel("T1", 1.0 / t1_us, cycle_duration_us), 1
            )
            rho = superop.apply_kraus(rho, kraus)
        rho = _MAP_Q2_TO_Q1 @ rho @ _MAP_Q2_TO_Q1.conj().T
        record, rho = measure_electron(rho, "Q1", rng, model)
        records.append(record)
    vote = majority_vote(records)
    return vote, records, rho


def majority_vote(records: list[bool]) -> bool:
    """Strict majority of 'up' records; ties resolve to 'down'."""
    return sum(records) > len(records) / 2


def majority_error(n_repeats: int, p_cycle_error: float) -> float:
    """Probability that majority voting misclassifies, given a symmetric
    per-cycle record error. Equals the binomial tail P[K > n/2] with
    K ~ Binom(n, p)."""
    threshold = math.floor(n_repeats / 2)  # error when strictly more than n/2
    return float(binom.sf(threshold, n_repeats, p_cycle_error))


def qnd_contrast(n_repeats: int, model: ReadoutModel = ReadoutModel()) -> float:
    """Analytic majority-vote contrast (vote 'up' iff records > n/2 are up).

    For odd n both error branches reduce to the symmetric binomial tail of
    `majority_error`; for even n ties count as 'down', which the 'up' error
    branch has to include.
    """
    n = n_repeats
    err_up = float(
        binom.sf(math.ceil(n / 2) - 1, n, 1.0 - model.p_read_up_given_up)
    )
    err_down = float(binom.sf(math.floor(n / 2), n, model.p_read_up_given_down))
    return (1.0 - err_up) - err_down
