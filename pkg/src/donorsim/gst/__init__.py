"""Gate set tomography on the simulated donor device.

Self-calibrating estimation of the native gate set: fiducial/germ circuit
design, maximum-likelihood fitting in a CPTP error-generator
parameterization, unitary gauge fixing, and a coherent/incoherent error
budget per gate.
"""

from .budget import (
    ErrorBudget,
    FidelityReport,
    GateBudget,
    average_fidelity,
    entanglement_fidelity,
    error_budget,
    fidelity,
    relational_misalignment,
)
from .design import GSTDesign, design_gst
from .estimate import ErrorBasis, GateSetEstimate, build_error_basis, estimate, lgst
from .gatesets import GateSet, conditional_unitary, target_gateset
from .gauge import apply_gauge, gauge_optimize
from .simulate import Dataset, exact_dataset, simulate_counts
from .suite import make_noisy_device, run_paper_suite

__all__ = [
    "Dataset",
    "ErrorBasis",
    "ErrorBudget",
    "FidelityReport",
    "GSTDesign",
    "GateBudget",
    "GateSet",
    "GateSetEstimate",
    "apply_gauge",
    "average_fidelity",
    "build_error_basis",
    "conditional_unitary",
    "design_gst",
    "entanglement_fidelity",
    "error_budget",
    "estimate",
    "exact_dataset",
    "fidelity",
    "gauge_optimize",
    "lgst",
    "make_noisy_device",
    "relational_misalignment",
    "run_paper_suite",
    "simulate_counts",
    "target_gateset",
]
