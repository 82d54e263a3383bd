"""Bell-state tomography from phase-swept reversal of the preparation.

The preparation circuit is undone by its inverse with every pulse axis
advanced by a common reversal phase phi. Because the corner coherence
|dd><uu| differs in both spins, it picks up the axis phase twice: the
up-proportion of the unwound state oscillates as cos(2 phi), with
amplitude |rho14| and phase arg(rho14). The literal inverse maps the
coherence onto the first-rotated electron only, so the second electron's
curve comes from the mirrored unwinding (same circuit with the qubit
roles swapped), which undoes the mirrored preparation of the same Bell
state. Corner populations rho11, rho44 come from a separate direct
Z-basis run.

Matrix indices follow the (uu, ud, du, dd) basis order used everywhere in
this package; the corner names rho11/rho14/rho41/rho44 use the
conventional (dd ... uu) ordering of reconstruction reports, i.e.
rho11 = <dd|rho|dd>, rho14 = <dd|rho|uu>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import superop
from .measure import IDEAL_READOUT, ReadoutModel, prob_read_up
from .pulses import CircuitNoise, Gate, apply_circuit, reversed_circuit
from .spin import STATE_INDEX, SpinSystemParams
from .states import initialize

_IDX_UU = STATE_INDEX["uu"]
_IDX_UD = STATE_INDEX["ud"]
_IDX_DU = STATE_INDEX["du"]
_IDX_DD = STATE_INDEX["dd"]


@dataclass
class PhaseReversalData:
    """Up-proportion curves versus reversal phase for both electrons."""

    phases: np.ndarray
    p_up_q1: np.ndarray
    p_up_q2: np.ndarray
    shots: int | None
    spam_corrected: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.phases = np.asarray(self.phases, dtype=float)
        self.p_up_q1 = np.asarray(self.p_up_q1, dtype=float)
        self.p_up_q2 = np.asarray(self.p_up_q2, dtype=float)
        if np.ptp(self.phases) < math.pi - 1e-9:
            raise ValueError(
                "phase sweep must cover one oscillation period (pi of reversal phase)"
            )
        for curve in (self.p_up_q1, self.p_up_q2):
            if curve.shape != self.phases.shape:
                raise ValueError("curves and phases must share a grid")
            if self.shots is not None and (curve.min() < 0 or curve.max() > 1):
                raise ValueError("sampled up-fractions must lie in [0, 1]")


@dataclass(frozen=True)
class CornerEstimate:
    """Corner elements of the two-qubit density matrix.

    rho11 and rho44 are the dd and uu populations; rho14 = <dd|rho|uu>.
    bound_exceeded marks |rho14| > sqrt(rho11*rho44); the value is kept
    as fitted (projection to a physical state happens later).
    """

    rho11: float
    rho44: float
    rho14: complex
    populations: np.ndarray
    fits: dict
    bound_exceeded: bool

    @property
    def rho41(self) -> complex:
        return np.conj(self.rho14)


def mirror_circuit(circuit: list[Gate]) -> list[Gate]:
    """Swap the qubit roles of every gate."""
    swap = {"Q1": "Q2", "Q2": "Q1", None: None}
    return [replace(g, target=swap[g.target]) if g.target else g for g in circuit]


def depolarize_two_qubit(rho: np.ndarray, p: float) -> np.ndarray:
    """(1-p) rho + p I/4; the Bell fidelity responds as 1 - 3p/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("depolarization probability must be in [0, 1]")
    return (1.0 - p) * rho + p * np.eye(4, dtype=complex) / 4.0


def phase_reversal_experiment(
    prep: list[Gate],
    phases: np.ndarray,
    shots: int | None = 10_000,
    noise: CircuitNoise | None = None,
    rng: int | np.random.Generator = 0,
    readout: ReadoutModel = IDEAL_READOUT,
    prep_error: float | tuple[float, float] = 0.0,
    post_prep_depol: float = 0.0,
    params: SpinSystemParams = SpinSystemParams(),
    mode: str = "ideal",
) -> PhaseReversalData:
    """Sweep the reversal phase and record both electrons' up-proportions.

    Per phase point the preparation runs twice: once followed by its own
    reversed circuit (electron Q1 measured) and once by the reversed
    mirrored circuit (electron Q2 measured). shots=None records exact Born
    probabilities instead of binomial fractions.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    phases = np.asarray(phases, dtype=float)
    rho0 = initialize("dd", prep_error)
    prepared = apply_circuit(rho0, prep, params=params, noise=noise, mode=mode)
    if post_prep_depol:
        prepared = depolarize_two_qubit(prepared, post_prep_depol)

    p_q1 = np.empty_like(phases)
    p_q2 = np.empty_like(phases)
    for i, phi in enumerate(phases):
        for qubit, unwind_base in (("Q1", prep), ("Q2", mirror_circuit(prep))):
            unwind = reversed_circuit(unwind_base, phi)
            final = apply_circuit(prepared, unwind, params=params, noise=noise, mode=mode)
            p = prob_read_up(final, qubit, readout)
            if shots is not None:
                p = rng.binomial(shots, min(max(p, 0.0), 1.0)) / shots
            (p_q1 if qubit == "Q1" else p_q2)[i] = p
    return PhaseReversalData(
        phases=phases,
        p_up_q1=p_q1,
        p_up_q2=p_q2,
        shots=shots,
        meta={"post_prep_depol": post_prep_depol, "mode": mode},
    )


def measure_populations(
    state_or_prep: np.ndarray | list[Gate],
    shots: int | None = 10_000,
    noise: CircuitNoise | None = None,
    rng: int | np.random.Generator = 0,
    readout: ReadoutModel = IDEAL_READOUT,
    prep_error: float | tuple[float, float] = 0.0,
    post_prep_depol: float = 0.0,
    params: SpinSystemParams = SpinSystemParams(),
    mode: str = "ideal",
) -> np.ndarray:
    """Joint Z-basis populations, indexed like the density matrix.

    Accepts either a prepared density matrix or a preparation circuit.
    Readout confusion acts independently per electron; shots=None returns
    exact probabilities.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if isinstance(state_or_prep, np.ndarray):
        rho = state_or_prep
    else:
        rho0 = initialize("dd", prep_error)
        rho = apply_circuit(rho0, state_or_prep, params=params, noise=noise, mode=mode)
    if post_prep_depol:
        rho = depolarize_two_qubit(rho, post_prep_depol)
    true_pops = np.clip(np.real(np.diag(rho)), 0.0, None)
    true_pops = true_pops / true_pops.sum()
    k1 = readout.confusion_matrix
    read_pops = np.kron(k1, k1) @ true_pops
    if shots is None:
        return read_pops
    counts = rng.multinomial(shots, read_pops)
    return counts / shots


def correct_populations(
    measured: np.ndarray,
    readout: ReadoutModel,
    prep_error: float | tuple[float, float] = 0.0,
) -> np.ndarray:
    """Invert readout confusion and preparation flips on measured populations.

    The preparation-flip inversion assumes the nominal circuit response for
    the flipped branches (dd and ud both land on Bell populations, du stays,
    uu swaps to ud), exact for an ideal circuit and first-order otherwise.
    """
    k1 = readout.confusion_matrix
    pops = np.linalg.solve(np.kron(k1, k1), np.asarray(measured, dtype=float))
    p1, p2 = prep_error if isinstance(prep_error, tuple) else (prep_error, prep_error)
    if p1 == 0.0 and p2 == 0.0:
        return pops
    w_dd = (1.0 - p1) * (1.0 - p2)
    w_ud = p1 * (1.0 - p2)
    w_du = (1.0 - p1) * p2
    w_uu = p1 * p2
    bell = np.zeros(4)
    bell[[_IDX_UU, _IDX_DD]] = 0.5
    image_du = np.eye(4)[_IDX_DU]
    image_uu = np.eye(4)[_IDX_UD]
    residual = w_ud * bell + w_du * image_du + w_uu * image_uu
    return (pops - residual) / w_dd


def fit_reversal_curve(phases: np.ndarray, p_up: np.ndarray) -> dict:
    """Least-squares fit of p(phi) = offset - amplitude cos(2 phi - psi).

    The period is fixed by the sweep, so the fit is linear in
    (offset, cos 2phi, sin 2phi); amplitude >= 0, psi in (-pi, pi].
    """
    phases = np.asarray(phases, dtype=float)
    design = np.column_stack(
        [np.ones_like(phases), np.cos(2.0 * phases), np.sin(2.0 * phases)]
    )
    coef, *_ = np.linalg.lstsq(design, np.asarray(p_up, dtype=float), rcond=None)
    b0, b1, b2 = coef
    amplitude = math.hypot(b1, b2)
    psi = math.atan2(-b2, -b1)
    resid = p_up - design @ coef
    return {
        "offset": float(b0),
        "amplitude": float(amplitude),
        "psi": float(psi),
        "residual_rms": float(np.sqrt(np.mean(resid**2))),
    }


def spam_correct(
    data: PhaseReversalData,
    readout: ReadoutModel,
    prep_error: float | tuple[float, float] = 0.0,
) -> PhaseReversalData:
    """Affine SPAM inversion of the up-proportion curves.

    Readout confusion is inverted exactly per point; preparation flips
    shrink the oscillation by (1-2p_target')(1-p_spectator') per curve
    (the flipped dd->ud branch lands on the opposite-sign Bell corner),
    so each curve's deviation from its mean is rescaled accordingly.
    """
    c = readout.contrast
    if c <= 0:
        raise ValueError("readout contrast must be positive to invert SPAM")
    p1, p2 = prep_error if isinstance(prep_error, tuple) else (prep_error, prep_error)
    slope_q1 = (1.0 - 2.0 * p1) * (1.0 - p2)
    slope_q2 = (1.0 - 2.0 * p2) * (1.0 - p1)
    if slope_q1 <= 0 or slope_q2 <= 0:
        raise ValueError("preparation error too large to invert")
    curves = []
    for raw, slope in ((data.p_up_q1, slope_q1), (data.p_up_q2, slope_q2)):
        inverted = (raw - readout.p_read_up_given_down) / c
        mean = inverted.mean()
        curves.append(mean + (inverted - mean) / slope)
    return PhaseReversalData(
        phases=data.phases.copy(),
        p_up_q1=curves[0],
        p_up_q2=curves[1],
        shots=data.shots,
        spam_corrected=True,
        meta=dict(data.meta),
    )


def extract_corners(data: PhaseReversalData, populations: np.ndarray) -> CornerEstimate:
    """Corner elements from the fitted oscillations plus measured populations.

    populations are Z-basis values indexed like the density matrix
    (uu, ud, du, dd). |rho14| averages the two electrons' fitted
    amplitudes; arg(rho14) averages their fitted phases (circularly).
    """
    populations = np.asarray(populations, dtype=float)
    fit_q1 = fit_reversal_curve(data.phases, data.p_up_q1)
    fit_q2 = fit_reversal_curve(data.phases, data.p_up_q2)
    amplitude = 0.5 * (fit_q1["amplitude"] + fit_q2["amplitude"])
    phasor = np.exp(1j * fit_q1["psi"]) + np.exp(1j * fit_q2["psi"])
    if abs(phasor) < 1e-12:
        arg = fit_q1["psi"]
    else:
        arg = math.atan2(phasor.imag, phasor.real)
    rho11 = float(populations[_IDX_DD])
    rho44 = float(populations[_IDX_UU])
    bound = math.sqrt(max(rho11, 0.0) * max(rho44, 0.0))
    return CornerEstimate(
        rho11=rho11,
        rho44=rho44,
        rho14=amplitude * np.exp(1j * arg),
        populations=populations,
        fits={"q1": fit_q1, "q2": fit_q2},
        bound_exceeded=bool(amplitude > bound + 1e-12),
    )


def corners_to_matrix(corners: CornerEstimate) -> np.ndarray:
    """Raw reconstructed matrix: measured diagonal plus the two corners.

    Coherences the corner method does not determine are left zero.
    """
    rho = np.diag(corners.populations).astype(complex)
    rho[_IDX_DD, _IDX_UU] = corners.rho14
    rho[_IDX_UU, _IDX_DD] = corners.rho41
    return rho


def bell_fidelity(corners: CornerEstimate, target: str = "phi_plus") -> float:
    """<target|rho|target> from the four corner elements."""
    sign = {"phi_plus": 1.0, "phi_minus": -1.0}.get(target)
    if sign is None:
        raise ValueError("target must be 'phi_plus' or 'phi_minus'")
    return float(0.5 * (corners.rho11 + corners.rho44) + sign * np.real(corners.rho14))


def _project_to_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    v = np.sort(values)[::-1]
    css = np.cumsum(v)
    k = np.arange(1, len(v) + 1)
    valid = v - (css - 1.0) / k > 0
    rho_idx = int(np.max(np.nonzero(valid)[0]))
    theta = (css[rho_idx] - 1.0) / (rho_idx + 1)
    return np.maximum(values - theta, 0.0)


def nearest_physical(rho_raw: np.ndarray) -> tuple[np.ndarray, bool]:
    """Frobenius-closest PSD, trace-one matrix and an already-physical flag.

    The input is symmetrized and trace-normalized first; the projection
    replaces the eigenvalues by their closest point on the probability
    simplex, which is exact for the Frobenius norm.
    """
    rho = np.asarray(rho_raw, dtype=complex)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    evals, evecs = np.linalg.eigh(rho)
    physical = bool(evals.min() >= -1e-10)
    projected = _project_to_simplex(evals)
    out = (evecs * projected) @ evecs.conj().T
    return 0.5 * (out + out.conj().T), physical


_SIGMA_Y_PAIR = np.kron(
    np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])
)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a physical two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -1e-8:
        raise ValueError("concurrence requires a positive semidefinite state")
    r = rho @ _SIGMA_Y_PAIR @ rho.conj() @ _SIGMA_Y_PAIR
    evals = np.sort(np.clip(np.linalg.eigvals(r).real, 0.0, None))[::-1]
    lam = np.sqrt(evals)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def run_bell_tomography(
    prep: list[Gate],
    phases: np.ndarray,
    shots: int | None = 10_000,
    noise: CircuitNoise | None = None,
    rng: int | np.random.Generator = 0,
    readout: ReadoutModel = IDEAL_READOUT,
    prep_error: float | tuple[float, float] = 0.0,
    post_prep_depol: float = 0.0,
    apply_spam_correction: bool = True,
    params: SpinSystemParams = SpinSystemParams(),
    mode: str = "ideal",
) -> dict:
    """Full pipeline: sweep, populations, SPAM correction, reconstruction.

    Returns raw and corrected corner estimates, Bell fidelity, the
    projected physical state, and its concurrence.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    common = dict(
        shots=shots,
        noise=noise,
        readout=readout,
        prep_error=prep_error,
        post_prep_depol=post_prep_depol,
        params=params,
        mode=mode,
    )
    data = phase_reversal_experiment(prep, phases, rng=rng, **common)
    pops_raw = measure_populations(prep, rng=rng, **common)

    corners_raw = extract_corners(data, pops_raw)
    fidelity_raw = bell_fidelity(corners_raw)

    if apply_spam_correction:
        data_used = spam_correct(data, readout, prep_error)
        pops_used = correct_populations(pops_raw, readout, prep_error)
    else:
        data_used, pops_used = data, pops_raw
    corners = extract_corners(data_used, pops_used)
    fidelity = bell_fidelity(corners)
    rho_raw = corners_to_matrix(corners)
    rho_phys, already_physical = nearest_physical(rho_raw)
    return {
        "data": data_used,
        "corners": corners,
        "corners_uncorrected": corners_raw,
        "fidelity": fidelity,
        "fidelity_uncorrected": fidelity_raw,
        "populations": pops_used,
        "rho_raw": rho_raw,
        "rho_physical": rho_phys,
        "raw_was_physical": already_physical,
        "concurrence": concurrence(rho_phys),
    }
