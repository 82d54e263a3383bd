"""Gate set estimation: linear inversion and maximum likelihood.

Gates are parameterized as expm(sum_k h_k H_k + sum_k s_k S_k) @ target,
one Hamiltonian coefficient (radians) and one stochastic rate per
nontrivial Pauli. The H_k are the superoperator generators of unitary
rotation about each Pauli axis; the S_k are Pauli jump channels minus
identity. Both leave the first row of the transfer matrix untouched, so
parameterized gates are trace preserving; with s_k >= 0 the exponential
of the Lindblad-form generator is completely positive as well. The
optimizer enforces s_k >= 0 through box bounds rather than squaring,
which would zero the gradient exactly at the boundary.

State preparation and measurement stay fixed at their targets during the
likelihood fit; gauge freedom against the SPAM frame is handled
separately after the fit.

Linear inversion (LGST) seeds the fit. With prepared-state matrix X
(states after each preparation fiducial, columns) and measured-effect
matrix Y (effects pulled back through each measurement fiducial, rows),
the probability tables factor as A = Y X and P_g = Y G X, so
X_t pinv(A) P_g pinv(X_t) recovers G in the target frame up to sampling
noise. The seed projects logm(G_hat inv(G_target)) onto the generator
bases, nonnegative least squares keeping the stochastic rates feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from ..superop import pauli_basis, pauli_labels
from .design import Circuit, GSTDesign
from .gatesets import GateSet
from .simulate import Dataset


@dataclass(frozen=True)
class ErrorBasis:
    """Hamiltonian and stochastic generator matrices for n qubits."""

    n_qubits: int
    labels: tuple[str, ...]
    hamiltonian: np.ndarray
    stochastic: np.ndarray
    hamiltonian_norms: np.ndarray
    stochastic_diagonals: np.ndarray

    @property
    def n_params(self) -> int:
        return 2 * len(self.labels)


def build_error_basis(n_qubits: int) -> ErrorBasis:
    dim = 4**n_qubits
    labels = pauli_labels(n_qubits)
    norm = 2 ** (n_qubits / 2)
    normalized = [p / norm for p in pauli_basis(n_qubits)]
    ham = np.zeros((dim - 1, dim, dim))
    sto = np.zeros((dim - 1, dim, dim))
    for k in range(1, dim):
        p = pauli_basis(n_qubits)[k]
        for a in range(dim):
            for b in range(dim):
                qa, qb = normalized[a], normalized[b]
                comm = -0.5j * (p @ qb - qb @ p)
                ham[k - 1, a, b] = np.real(np.trace(qa.conj().T @ comm))
                jump = p @ qb @ p - qb
                sto[k - 1, a, b] = np.real(np.trace(qa.conj().T @ jump))
    norms = np.array([np.sum(h * h) for h in ham])
    diags = np.stack([np.diagonal(s) for s in sto], axis=1)
    return ErrorBasis(
        n_qubits=n_qubits,
        labels=tuple(labels[1:]),
        hamiltonian=ham,
        stochastic=sto,
        hamiltonian_norms=norms,
        stochastic_diagonals=diags,
    )


def gate_from_params(
    h: np.ndarray, s: np.ndarray, basis: ErrorBasis, target: np.ndarray
) -> np.ndarray:
    gen = np.tensordot(h, basis.hamiltonian, axes=1)
    gen += np.tensordot(s, basis.stochastic, axes=1)
    return scipy.linalg.expm(gen) @ target


def params_from_gate(
    gate: np.ndarray, target: np.ndarray, basis: ErrorBasis
) -> tuple[np.ndarray, np.ndarray, float]:
    """Project the gate's error generator onto the parameter bases.

    Returns (h, s, residual) where residual is the Frobenius norm of the
    generator part outside the Hamiltonian+stochastic span. Stochastic
    rates are clipped to feasibility by nonnegative least squares.
    """
    relative = gate @ np.linalg.inv(target)
    gen = np.real(scipy.linalg.logm(relative))
    h = np.tensordot(basis.hamiltonian, gen, axes=([1, 2], [0, 1]))
    h /= basis.hamiltonian_norms
    remainder = gen - np.tensordot(h, basis.hamiltonian, axes=1)
    s, _ = scipy.optimize.nnls(basis.stochastic_diagonals, np.diagonal(remainder))
    remainder = remainder - np.tensordot(s, basis.stochastic, axes=1)
    return h, s, float(np.linalg.norm(remainder))


@dataclass
class GateSetEstimate:
    estimate: GateSet
    target: GateSet
    seed: GateSet
    params: dict[str, tuple[np.ndarray, np.ndarray]]
    nll: float
    converged: bool
    n_iterations: int
    diagnostics: dict = field(default_factory=dict)


def _fraction_table(dataset: Dataset, circuits: list[Circuit]) -> np.ndarray:
    return np.stack([dataset.fractions(c) for c in circuits])


def lgst(dataset: Dataset, design: GSTDesign, target: GateSet) -> GateSet:
    """Linear-inversion estimate in the target gauge frame.

    The result is not constrained to be physical; it seeds the
    likelihood fit and is useful on its own only at high shot counts.
    """
    preps, meas = design.prep_fiducials, design.meas_fiducials
    n_out = len(target.outcome_labels)

    def table(mid: Circuit) -> np.ndarray:
        rows = []
        for fm in meas:
            frac = _fraction_table(dataset, [fp + mid + fm for fp in preps])
            rows.append(frac.T)
        return np.concatenate(rows, axis=0)

    gram = table(())
    gram_pinv = np.linalg.pinv(gram, rcond=1e-10)

    x_t = np.stack([_propagate(target, fp) for fp in preps], axis=1)
    x_pinv = np.linalg.pinv(x_t, rcond=1e-10)

    gates = {
        g: x_t @ gram_pinv @ table((g,)) @ x_pinv for g in target.labels
    }
    rho_rows = np.concatenate(
        [dataset.fractions(fm) for fm in meas]
    ).reshape(len(meas) * n_out)
    rho_hat = x_t @ gram_pinv @ rho_rows
    effects = {}
    for e_idx, e_label in enumerate(target.outcome_labels):
        b = np.array([dataset.fractions(fp)[e_idx] for fp in preps])
        effects[e_label] = b @ x_pinv
    return GateSet(
        gates=gates,
        rho=rho_hat,
        effects=effects,
        n_qubits=target.n_qubits,
        meta={"method": "lgst"},
    )


def _propagate(gateset: GateSet, circuit: Circuit) -> np.ndarray:
    v = gateset.rho.copy()
    for label in circuit:
        v = gateset.gates[label] @ v
    return v


class _Likelihood:
    """Batched negative log likelihood and analytic gradient.

    Circuits are grouped by length; forward prefix states and backward
    effect cotangents accumulate one cotangent matrix per gate, and the
    chain rule through the matrix exponential uses the Frechet-derivative
    adjoint, one expm_frechet call per gate per evaluation.
    """

    def __init__(self, dataset: Dataset, target: GateSet, basis: ErrorBasis):
        self.target = target
        self.basis = basis
        self.labels = target.labels
        self.index = {g: i for i, g in enumerate(self.labels)}
        self.dim = target.dim
        self.effects = target.effect_matrix()
        self.rho = target.rho
        self.targets = np.stack([target.gates[g] for g in self.labels])
        groups: dict[int, tuple[list[list[int]], list[np.ndarray]]] = {}
        for circuit, counts in dataset.counts.items():
            seqs, rows = groups.setdefault(len(circuit), ([], []))
            seqs.append([self.index[g] for g in circuit])
            rows.append(np.asarray(counts, dtype=float))
        self.groups = [
            (np.array(seqs, dtype=np.intp).reshape(len(seqs), length),
             np.stack(rows))
            for length, (seqs, rows) in sorted(groups.items())
        ]
        self.total = float(sum(rows.sum() for _, rows in self.groups))
        k = len(basis.labels)
        self.n_params_per_gate = 2 * k
        self.n_params = len(self.labels) * self.n_params_per_gate

    def split(self, theta: np.ndarray) -> dict[str, tuple[np.ndarray, np.ndarray]]:
        k = len(self.basis.labels)
        out = {}
        for i, g in enumerate(self.labels):
            block = theta[i * 2 * k : (i + 1) * 2 * k]
            out[g] = (block[:k].copy(), block[k:].copy())
        return out

    def join(self, params: dict[str, tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
        return np.concatenate(
            [np.concatenate(params[g]) for g in self.labels]
        )

    def gates_and_generators(self, theta: np.ndarray):
        k = len(self.basis.labels)
        gens = np.zeros((len(self.labels), self.dim, self.dim))
        gates = np.zeros_like(gens)
        for i in range(len(self.labels)):
            h = theta[i * 2 * k : i * 2 * k + k]
            s = theta[i * 2 * k + k : (i + 1) * 2 * k]
            gen = np.tensordot(h, self.basis.hamiltonian, axes=1)
            gen += np.tensordot(s, self.basis.stochastic, axes=1)
            gens[i] = gen
            gates[i] = scipy.linalg.expm(gen) @ self.targets[i]
        return gates, gens

    def value_and_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        gates, gens = self.gates_and_generators(theta)
        nll = 0.0
        cotangent = np.zeros_like(gates)
        for seqs, counts in self.groups:
            n, length = seqs.shape
            states = np.broadcast_to(self.rho, (n, self.dim)).copy()
            prefixes = np.empty((length + 1, n, self.dim))
            prefixes[0] = states
            for t in range(length):
                col = seqs[:, t]
                for g in np.unique(col):
                    m = col == g
                    states[m] = states[m] @ gates[g].T
                prefixes[t + 1] = states
            probs = states @ self.effects.T
            safe = np.clip(probs, 1e-12, None)
            nll -= float(np.sum(counts * np.log(safe)))
            weights = np.where(counts > 0, -counts / safe, 0.0)
            cot = weights @ self.effects
            for t in range(length - 1, -1, -1):
                col = seqs[:, t]
                for g in np.unique(col):
                    m = col == g
                    cotangent[g] += cot[m].T @ prefixes[t][m]
                    cot[m] = cot[m] @ gates[g]
        grad = np.zeros(self.n_params)
        k = len(self.basis.labels)
        for i in range(len(self.labels)):
            adjoint = scipy.linalg.expm_frechet(
                gens[i].T, cotangent[i] @ self.targets[i].T, compute_expm=False
            )
            grad[i * 2 * k : i * 2 * k + k] = np.tensordot(
                self.basis.hamiltonian, adjoint, axes=([1, 2], [0, 1])
            )
            grad[i * 2 * k + k : (i + 1) * 2 * k] = np.tensordot(
                self.basis.stochastic, adjoint, axes=([1, 2], [0, 1])
            )
        return nll / self.total, grad / self.total


def estimate(
    dataset: Dataset,
    design: GSTDesign,
    target: GateSet,
    max_iterations: int = 800,
    gtol: float = 1e-6,
    ftol: float = 1e-9,
    seed_gateset: GateSet | None = None,
) -> GateSetEstimate:
    """LGST seed followed by bounded maximum-likelihood refinement.

    Convergence is declared when the projected gradient infinity norm of
    the per-shot-normalized negative log likelihood drops below gtol or
    the relative objective change per iteration drops below ftol.
    """
    basis = build_error_basis(target.n_qubits)
    seed = seed_gateset if seed_gateset is not None else lgst(dataset, design, target)
    params0 = {}
    seed_residuals = {}
    for g in target.labels:
        h, s, resid = params_from_gate(seed.gates[g], target.gates[g], basis)
        params0[g] = (h, s)
        seed_residuals[g] = resid

    engine = _Likelihood(dataset, target, basis)
    theta0 = engine.join(params0)
    k = len(basis.labels)
    bounds = []
    for _ in target.labels:
        bounds.extend([(None, None)] * k)
        bounds.extend([(0.0, None)] * k)

    result = scipy.optimize.minimize(
        engine.value_and_grad,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": max_iterations, "gtol": gtol, "ftol": ftol},
    )

    params = engine.split(result.x)
    gates = {
        g: gate_from_params(params[g][0], params[g][1], basis, target.gates[g])
        for g in target.labels
    }
    estimate = GateSet(
        gates=gates,
        rho=target.rho.copy(),
        effects={e: v.copy() for e, v in target.effects.items()},
        n_qubits=target.n_qubits,
        meta={"method": "mle"},
    )
    nll0, _ = engine.value_and_grad(theta0)
    return GateSetEstimate(
        estimate=estimate,
        target=target,
        seed=seed,
        params=params,
        nll=float(result.fun),
        converged=bool(result.success),
        n_iterations=int(result.nit),
        diagnostics={
            "nll_seed": float(nll0),
            "seed_residuals": seed_residuals,
            "message": str(result.message),
            "grad_inf_norm": float(np.max(np.abs(result.jac))),
            "total_shots": engine.total,
        },
    )
