"""Pauli transfer matrices, Kraus / Choi conversions, and noise channels."""

import math

import numpy as np
import pytest

from donorsim.states import bell_state, density
from donorsim.superop import (
    amplitude_damping_kraus,
    apply_kraus,
    apply_ptm,
    channel,
    choi_from_kraus,
    choi_from_ptm,
    dephasing_kraus,
    depolarizing_kraus,
    effect_pauli_vector,
    is_completely_positive,
    is_trace_preserving,
    kraus_is_trace_preserving,
    lift_kraus,
    pauli_basis,
    pauli_labels,
    pauli_vector,
    ptm_from_kraus,
    ptm_from_unitary,
    state_from_pauli_vector,
    superop_from_kraus,
    superop_from_ptm,
    vec,
    unvec,
)

RNG = np.random.default_rng(20260817)


def random_unitary(dim: int, rng) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus_channel(dim: int, n_ops: int, rng) -> list[np.ndarray]:
    """Random CPTP channel via a Stinespring isometry."""
    z = rng.normal(size=(dim * n_ops, dim)) + 1j * rng.normal(size=(dim * n_ops, dim))
    q, _ = np.linalg.qr(z)
    return [q[k * dim:(k + 1) * dim, :] for k in range(n_ops)]


def random_density(dim: int, rng) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = z @ z.conj().T
    return rho / np.trace(rho)


def test_vec_unvec_roundtrip():
    mat = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
    assert np.allclose(unvec(vec(mat)), mat)
    # column stacking: vec(A rho B) = (B^T kron A) vec(rho)
    a, b, rho = (RNG.normal(size=(2, 2)) for _ in range(3))
    assert np.allclose(np.kron(b.T, a) @ vec(rho), vec(a @ rho @ b))


def test_pauli_labels_and_basis():
    assert pauli_labels(1) == ("I", "X", "Y", "Z")
    assert pauli_labels(2)[:4] == ("II", "IX", "IY", "IZ")
    basis_2q = pauli_basis(2)
    assert len(basis_2q) == 16
    # unnormalized: P^2 = I, tr(P_i P_j) = 4 delta_ij
    for i, p in enumerate(basis_2q):
        assert np.allclose(p @ p, np.eye(4), atol=1e-12)
        for j, q in enumerate(basis_2q):
            expected = 4.0 if i == j else 0.0
            assert np.trace(p @ q).real == pytest.approx(expected, abs=1e-12)


def test_pauli_vector_roundtrip_and_normalization():
    rho = random_density(4, RNG)
    r = pauli_vector(rho)
    assert r[0] == pytest.approx(1.0 / 2.0, abs=1e-12)  # tr(rho I/2) for d=4
    assert np.allclose(state_from_pauli_vector(r), rho, atol=1e-12)


def test_effect_vector_gives_probabilities():
    rho = random_density(4, RNG)
    effect = np.diag([1.0, 1.0, 0.0, 0.0])  # Q1 up projector
    p_direct = np.trace(effect @ rho).real
    p_pauli = float(effect_pauli_vector(effect) @ pauli_vector(rho))
    assert p_pauli == pytest.approx(p_direct, abs=1e-12)


def test_unitary_ptms_are_orthogonal_many_cases():
    """PTMs of unitaries are real orthogonal matrices (100+ random cases)."""
    for dim in (2, 4):
        for _ in range(60):
            u = random_unitary(dim, RNG)
            ptm = ptm_from_unitary(u)
            assert np.allclose(ptm.imag if np.iscomplexobj(ptm) else 0.0, 0.0)
            assert np.linalg.norm(ptm @ ptm.T - np.eye(dim * dim)) < 1e-10


def test_random_channels_are_cptp_many_cases():
    """Choi PSD within 1e-8 and trace preservation within 1e-10 on 100+
    random Kraus channels."""
    for dim, n_ops in ((2, 1), (2, 2), (2, 4), (4, 2), (4, 6)):
        for _ in range(24):
            kraus = random_kraus_channel(dim, n_ops, RNG)
            assert kraus_is_trace_preserving(kraus, atol=1e-10)
            ptm = ptm_from_kraus(kraus)
            assert is_trace_preserving(ptm, atol=1e-10)
            assert is_completely_positive(ptm, atol=1e-8)
            choi = choi_from_kraus(kraus)
            assert np.linalg.eigvalsh(choi).min() > -1e-8


def test_ptm_kraus_superop_consistency():
    kraus = random_kraus_channel(2, 3, RNG)
    rho = random_density(2, RNG)
    out_kraus = apply_kraus(rho, kraus)
    out_ptm = apply_ptm(ptm_from_kraus(kraus), rho)
    assert np.allclose(out_kraus, out_ptm, atol=1e-12)
    superop = superop_from_kraus(kraus)
    assert np.allclose(unvec(superop @ vec(rho)), out_kraus, atol=1e-12)
    assert np.allclose(superop_from_ptm(ptm_from_kraus(kraus)), superop, atol=1e-12)


def test_choi_from_ptm_consistent_with_kraus():
    kraus = random_kraus_channel(2, 2, RNG)
    choi_a = choi_from_kraus(kraus)
    choi_b = choi_from_ptm(ptm_from_kraus(kraus))
    assert np.allclose(choi_a, choi_b, atol=1e-12)


def test_depolarizing_channel_forms():
    p = 0.12
    kraus = depolarizing_kraus(p)
    ptm = ptm_from_kraus(kraus)
    assert np.allclose(ptm, np.diag([1.0, 1 - p, 1 - p, 1 - p]), atol=1e-12)
    # rho -> (1-p) rho + p I/2
    rho = random_density(2, RNG)
    expected = (1 - p) * rho + p * np.eye(2) / 2
    assert np.allclose(apply_kraus(rho, kraus), expected, atol=1e-12)


def test_dephasing_channel_shrinks_coherences():
    p = 0.3
    ptm = ptm_from_kraus(dephasing_kraus(p))
    assert np.allclose(ptm, np.diag([1.0, 1 - 2 * p, 1 - 2 * p, 1.0]), atol=1e-12)


def test_amplitude_damping_fixed_point():
    kraus = amplitude_damping_kraus(0.25)
    down = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    assert np.allclose(apply_kraus(down, kraus), down, atol=1e-12)
    up = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    out = apply_kraus(up, kraus)
    assert out[0, 0].real == pytest.approx(0.75)


def test_channel_semigroup_composition():
    """channel(kind, rate, t1) o channel(kind, rate, t2) = channel(..., t1+t2)."""
    for kind in ("T1", "T2", "depolarizing"):
        a = ptm_from_kraus(channel(kind, 0.21, 0.7))
        b = ptm_from_kraus(channel(kind, 0.21, 1.6))
        ab = ptm_from_kraus(channel(kind, 0.21, 2.3))
        assert np.allclose(a @ b, ab, atol=1e-10), kind


def test_channel_rates_match_exponential_forms():
    rate, t = 0.05, 3.0
    t1 = ptm_from_kraus(channel("T1", rate, t))
    assert t1[3, 3] == pytest.approx(math.exp(-rate * t), abs=1e-12)
    assert t1[1, 1] == pytest.approx(math.exp(-0.5 * rate * t), abs=1e-12)
    t2 = ptm_from_kraus(channel("T2", rate, t))
    assert t2[1, 1] == pytest.approx(math.exp(-rate * t), abs=1e-12)
    assert t2[3, 3] == pytest.approx(1.0, abs=1e-12)
    dep = ptm_from_kraus(channel("depolarizing", rate, t))
    assert dep[1, 1] == pytest.approx(math.exp(-rate * t), abs=1e-12)
    with pytest.raises(ValueError):
        channel("T3", rate, t)


def test_lift_kraus_acts_on_selected_qubit():
    kraus = depolarizing_kraus(0.4)
    rho = density(bell_state("phi_plus"))
    on_q1 = apply_kraus(rho, lift_kraus(kraus, 0))
    on_q2 = apply_kraus(rho, lift_kraus(kraus, 1))
    # depolarizing either half of a Bell pair damps coherence identically
    assert on_q1[0, 3] == pytest.approx(on_q2[0, 3])
    assert on_q1[0, 3].real == pytest.approx(0.5 * 0.6)
    # but marginals differ for an asymmetric input
    asym = np.kron(np.diag([0.9, 0.1]), np.diag([0.2, 0.8])).astype(complex)
    out = apply_kraus(asym, lift_kraus(kraus, 0))
    q1 = np.trace(out.reshape(2, 2, 2, 2), axis1=1, axis2=3)
    assert q1[0, 0].real == pytest.approx(0.6 * 0.9 + 0.4 * 0.5)


def test_is_completely_positive_flags_transpose_map():
    # transposition is positive but not completely positive
    transpose_superop = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            transpose_superop[2 * j + i, 2 * i + j] = 1.0
    from donorsim.superop import ptm_from_superop

    assert not is_completely_positive(ptm_from_superop(transpose_superop))
