"""Simulation toolkit for exchange-coupled donor spin qubits in silicon.

The package models a pair of phosphorus-donor electron spins whose exchange
coupling is weak compared to the hyperfine detuning, so two-qubit logic runs
on conditional rotations addressed by frequency.  Modules:

- spin: static Hamiltonian, eigenstates, ESR line positions
- pulses: time-domain pulse propagation and the native gate set
- states / measure: preparation, readout models, QND repetition
- noise / coherence: quasi-static and Markovian noise, Ramsey / Hahn decay
- superop: Pauli transfer matrices, Kraus / Choi conversions, channels
- tomography: Bell-state reconstruction by phase reversal
- geometric: Pancharatnam phase of detuned rotations
- gst: gate set tomography, error generators, fidelity budgets
- runner / cli: config-driven experiment execution
"""

from .coherence import analytic_t2star, hahn_experiment, ramsey_experiment
from .measure import ReadoutModel, majority_error, qnd_contrast
from .noise import NoiseParams, NoiseSampler
from .pulses import (
    DEFAULT_RABI_MHZ,
    CircuitNoise,
    Gate,
    apply_circuit,
    bell_prep_circuit,
    crot,
    gate_duration,
    idle,
    native_gate,
    propagate_pulse,
    x90,
    y90,
    zcrot,
)
from .spin import (
    NuclearConfig,
    SpinSystemParams,
    eigenstates,
    esr_frequencies,
    mixing_angle,
)
from .states import bell_state, initialize, ket
from .tomography import concurrence, run_bell_tomography

__version__ = "0.1.0"

__all__ = [
    "CircuitNoise",
    "DEFAULT_RABI_MHZ",
    "Gate",
    "NoiseParams",
    "NoiseSampler",
    "NuclearConfig",
    "ReadoutModel",
    "SpinSystemParams",
    "analytic_t2star",
    "apply_circuit",
    "bell_prep_circuit",
    "bell_state",
    "concurrence",
    "crot",
    "eigenstates",
    "esr_frequencies",
    "gate_duration",
    "hahn_experiment",
    "idle",
    "initialize",
    "ket",
    "majority_error",
    "mixing_angle",
    "native_gate",
    "propagate_pulse",
    "qnd_contrast",
    "ramsey_experiment",
    "run_bell_tomography",
    "x90",
    "y90",
    "zcrot",
]
