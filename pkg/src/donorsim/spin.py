"""Static spin Hamiltonians for two exchange-coupled donor electron qubits.

The system is two phosphorus donors, each binding one electron (spin 1/2)
hyperfine-coupled to its own 31P nucleus (spin 1/2), with a weak exchange
coupling J between the electrons:

    H = mu_B/h B0 (g1 Sz1 + g2 Sz2) + gamma_n B0 (Iz1 + Iz2)
        + A1 S1.I1 + A2 S2.I2 + J S1.S2        (all terms in MHz)

Basis conventions
-----------------
Single spins are ordered (up, down), so Sz = diag(+1/2, -1/2). The full
16-dim space is ordered electron1 x electron2 x nucleus1 x nucleus2; the
4-dim electron space is (uu, ud, du, dd) with |dd> at index 3. A nucleus in
"up" shifts its own electron's resonance by +A/2.

With the nuclei frozen (secular hyperfine only) the electrons reduce to

    H_eff = nu1 Sz1 + nu2 Sz2 + J S1.S2,   nu_i = g_i mu_B B0 / h + A_i m_i,

whose middle levels mix with angle theta, tan(2 theta) = J / (nu1 - nu2).
For J > 0 and nu1 > nu2 the orthonormal eigenvectors are

    upper:  cos(theta)|ud> + sin(theta)|du>
    lower:  cos(theta)|du> - sin(theta)|ud>

(the minus sign keeps them orthogonal; only |overlaps| are observable).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .constants import (
    B0_DEFAULT_T,
    EXCHANGE_DEFAULT_MHZ,
    G_FACTOR_DEFAULT,
    GAMMA_N_MHZ_PER_T,
    HYPERFINE_DEFAULT_MHZ,
    MU_B_OVER_H_MHZ_PER_T,
)

# Spin-1/2 operators in the (up, down) basis.
SX = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = 0.5 * np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = 0.5 * np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

#: Index of each electron product state in the 4-dim electron basis.
STATE_INDEX = {"uu": 0, "ud": 1, "du": 2, "dd": 3}
STATE_LABELS = ("uu", "ud", "du", "dd")


@dataclass(frozen=True)
class SpinSystemParams:
    """Static parameters of the two-donor system (MHz and tesla).

    Defaults reproduce the device regime this package targets: B0 = 1 T,
    g ~ 1.9985 on both donors, hyperfine 112 MHz on both, exchange 12 MHz.
    """

    b0: float = B0_DEFAULT_T
    g1: float = G_FACTOR_DEFAULT
    g2: float = G_FACTOR_DEFAULT
    a1: float = HYPERFINE_DEFAULT_MHZ
    a2: float = HYPERFINE_DEFAULT_MHZ
    j: float = EXCHANGE_DEFAULT_MHZ
    gamma_n: float = GAMMA_N_MHZ_PER_T

    def __post_init__(self) -> None:
        if self.b0 <= 0:
            raise ValueError(f"b0 must be positive, got {self.b0}")
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError("hyperfine couplings must be non-negative")
        if self.j < 0:
            raise ValueError("exchange coupling must be non-negative")

    @property
    def abar(self) -> float:
        """Mean hyperfine coupling (MHz)."""
        return 0.5 * (self.a1 + self.a2)


@dataclass(frozen=True)
class NuclearConfig:
    """Frozen nuclear spin projections; 'up' or 'down' per nucleus."""

    n1: str = "up"
    n2: str = "down"

    def __post_init__(self) -> None:
        for name in (self.n1, self.n2):
            if name not in ("up", "down"):
                raise ValueError(f"nuclear state must be 'up' or 'down', got {name!r}")

    @property
    def m1(self) -> float:
        return 0.5 if self.n1 == "up" else -0.5

    @property
    def m2(self) -> float:
        return 0.5 if self.n2 == "up" else -0.5


@dataclass(frozen=True)
class EigenSolution:
    """Eigensystem of the effective electron Hamiltonian.

    energies are ascending (MHz); states holds the matching orthonormal
    eigenvectors as columns in the (uu, ud, du, dd) basis; theta is the
    middle-doublet mixing angle in radians.
    """

    energies: np.ndarray
    states: np.ndarray
    theta: float


def _kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def _site_op(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-spin operator at a given site of a kron chain."""
    factors = [ID2] * n_sites
    factors[site] = op
    return _kron(*factors)


def _dot(ops_a, ops_b) -> np.ndarray:
    return sum(a @ b for a, b in zip(ops_a, ops_b))


def electron_frequencies(
    params: SpinSystemParams, nucs: NuclearConfig = NuclearConfig()
) -> tuple[float, float]:
    """Secular electron resonance frequencies (nu1, nu2) in MHz.

    nu_i = g_i mu_B B0 / h + A_i m_i with m_i = +-1/2 the frozen nuclear
    projection, i.e. a nucleus in 'up' shifts its electron by +A/2.
    """
    zeeman1 = params.g1 * MU_B_OVER_H_MHZ_PER_T * params.b0
    zeeman2 = params.g2 * MU_B_OVER_H_MHZ_PER_T * params.b0
    return zeeman1 + params.a1 * nucs.m1, zeeman2 + params.a2 * nucs.m2


def build_full_hamiltonian(params: SpinSystemParams) -> np.ndarray:
    """Full 16x16 Hamiltonian (MHz) on electron1 x electron2 x nucleus1 x nucleus2."""
    s1 = [_site_op(op, 0, 4) for op in (SX, SY, SZ)]
    s2 = [_site_op(op, 1, 4) for op in (SX, SY, SZ)]
    i1 = [_site_op(op, 2, 4) for op in (SX, SY, SZ)]
    i2 = [_site_op(op, 3, 4) for op in (SX, SY, SZ)]

    h = params.g1 * MU_B_OVER_H_MHZ_PER_T * params.b0 * s1[2]
    h = h + params.g2 * MU_B_OVER_H_MHZ_PER_T * params.b0 * s2[2]
    h = h + params.gamma_n * params.b0 * (i1[2] + i2[2])
    h = h + params.a1 * _dot(s1, i1)
    h = h + params.a2 * _dot(s2, i2)
    h = h + params.j * _dot(s1, s2)
    return h


def exchange_term_4d(j: float) -> np.ndarray:
    """J S1.S2 on the 4-dim electron space."""
    s1 = [_site_op(op, 0, 2) for op in (SX, SY, SZ)]
    s2 = [_site_op(op, 1, 2) for op in (SX, SY, SZ)]
    return j * _dot(s1, s2)


def effective_electron_hamiltonian(
    params: SpinSystemParams, nucs: NuclearConfig = NuclearConfig()
) -> np.ndarray:
    """4x4 electron Hamiltonian (MHz) with the nuclei frozen in `nucs`.

    Keeps the secular part of the hyperfine interaction only. Constant
    energy offsets from the nuclear Zeeman term are dropped; they cancel
    from every electron transition.
    """
    nu1, nu2 = electron_frequencies(params, nucs)
    h = nu1 * _site_op(SZ, 0, 2) + nu2 * _site_op(SZ, 1, 2)
    return h + exchange_term_4d(params.j)


def mixing_angle(params: SpinSystemParams) -> float:
    """Middle-doublet mixing angle theta = atan(j / abar) / 2, radians.

    Defined for anti-parallel nuclei, where the electron frequency
    difference equals the mean hyperfine coupling. Warns when the exchange
    is not small against the hyperfine scale, where the conditional-rotation
    picture starts to degrade.
    """
    if params.abar == 0:
        raise ValueError("mixing angle undefined for zero hyperfine coupling")
    if params.j >= params.abar:
        warnings.warn(
            "exchange is not weak compared to the hyperfine splitting; "
            "the conditional-rotation regime assumptions are violated",
            stacklevel=2,
        )
    return 0.5 * np.arctan2(params.j, params.abar)


def eigenstates(
    params: SpinSystemParams, nucs: NuclearConfig = NuclearConfig()
) -> EigenSolution:
    """Diagonalize the effective electron Hamiltonian.

    Energies are ascending. Each eigenvector's phase is fixed by making its
    largest-magnitude component real and positive, so for weak exchange the
    columns line up with (dd, ~du, ~ud, uu) at the default field.
    """
    h = effective_electron_hamiltonian(params, nucs)
    energies, states = np.linalg.eigh(h)
    states = states.astype(complex)
    for k in range(states.shape[1]):
        lead = np.argmax(np.abs(states[:, k]))
        phase = states[lead, k] / abs(states[lead, k])
        states[:, k] = states[:, k] / phase
    theta = mixing_angle(params)
    return EigenSolution(energies=energies, states=states, theta=theta)


def _dominant_labels(states: np.ndarray) -> list[str]:
    labels = [STATE_LABELS[int(np.argmax(np.abs(states[:, k])))] for k in range(4)]
    if len(set(labels)) != 4:
        raise ValueError(
            "eigenstates are too strongly mixed to assign product-state labels"
        )
    return labels


def esr_frequencies(
    params: SpinSystemParams, nucs: NuclearConfig = NuclearConfig()
) -> list[tuple[float, str, str]]:
    """The four allowed single-electron-flip transition frequencies.

    Returns (frequency_mhz, target, control_state) tuples ordered
    (Q1, down), (Q1, up), (Q2, down), (Q2, up), where `target` is the
    electron that flips and `control_state` the label of the other electron
    shared by both levels of the transition.
    """
    sol = eigenstates(params, nucs)
    labels = _dominant_labels(sol.states)
    level_of = {lab: k for k, lab in enumerate(labels)}

    def line(target: str, control: str) -> tuple[float, str, str]:
        if target == "Q1":
            lo, hi = ("d" + control[0], "u" + control[0])
        else:
            lo, hi = (control[0] + "d", control[0] + "u")
        freq = sol.energies[level_of[hi]] - sol.energies[level_of[lo]]
        return (freq, target, control)

    return [
        line("Q1", "down"),
        line("Q1", "up"),
        line("Q2", "down"),
        line("Q2", "up"),
    ]


def esr_line(
    params: SpinSystemParams,
    target: str,
    control: str,
    nucs: NuclearConfig = NuclearConfig(),
) -> float:
    """Frequency (MHz) of one conditional ESR line."""
    for freq, tgt, ctl in esr_frequencies(params, nucs):
        if tgt == target and ctl == control:
            return freq
    raise ValueError(f"no ESR line for target={target!r}, control={control!r}")
