"""Bell state preparation followed by phase-sweep tomography.

Runs the two-pulse Bell preparation through the tomography pipeline
twice. The first pass is noiseless with perfect readout and lands within
sampling error of the product-basis ceiling. The second pass adds
preparation errors, depolarization after the entangling step, and
realistic readout, then shows how much of the loss SPAM correction wins
back compared with the uncorrected estimate.
"""

import numpy as np

from donorsim.measure import IDEAL_READOUT, ReadoutModel
from donorsim.pulses import bell_prep_circuit
from donorsim.tomography import run_bell_tomography


def main() -> None:
    circuit = bell_prep_circuit()
    phases = np.linspace(0.0, 2.0 * np.pi, 41)

    clean = run_bell_tomography(
        circuit, phases, shots=10_000, rng=np.random.default_rng(5),
        readout=IDEAL_READOUT,
    )
    print("noiseless preparation, ideal readout:")
    print(f"  fidelity    = {clean['fidelity']:.5f}")
    print(f"  concurrence = {clean['concurrence']:.5f}")

    p_cal = (1.0 - 0.93) / 0.75
    noisy = run_bell_tomography(
        circuit, phases, shots=10_000, rng=np.random.default_rng(21),
        readout=ReadoutModel(0.95, 0.05),
        prep_error=(0.02, 0.03), post_prep_depol=p_cal,
    )
    print("\nwith preparation errors, post-entangling depolarization, and "
          "5% readout errors:")
    print(f"  fidelity (SPAM corrected) = {noisy['fidelity']:.5f}")
    print(f"  fidelity (uncorrected)    = {noisy['fidelity_uncorrected']:.5f}")
    print(f"  concurrence               = {noisy['concurrence']:.5f}")
    print(f"  raw matrix physical?        {noisy['raw_was_physical']}")
    print("\ncorrection removes the readout contribution but not the state "
          "error itself,")
    print("so the corrected number isolates what the preparation actually "
          "delivered.")


if __name__ == "__main__":
    main()
