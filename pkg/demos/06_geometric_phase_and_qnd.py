"""Two measurement-side capabilities: branch phases and repeated readout.

Part one sweeps the drive detuning of a conditional 2*pi rotation and
checks the phase left on the control against minus half the solid angle
enclosed by the target's Bloch trajectory. The two numbers come from
independent calculations (state overlap vs path geometry) and track each
other across the sweep.

Part two takes a readout whose single-shot contrast is poor and shows how
majority voting over repeated non-demolition cycles recovers it, both
analytically and by sampling.
"""

import math

import numpy as np

from donorsim.geometric import geometric_phase_analysis, wrap_phase
from donorsim.measure import ReadoutModel, qnd_contrast, qnd_readout
from donorsim.states import density, ket


def main() -> None:
    rabi = 0.2
    rotation = 2.0 * math.pi
    print("conditional 2*pi rotation: control phase vs -solid angle/2")
    print(f"{'detuning/rabi':>14} {'branch phase':>13} {'half solid angle':>17} "
          f"{'difference':>11}")
    for ratio in (0.0, 0.05, 0.1, 0.2, 0.3):
        res = geometric_phase_analysis(ratio * rabi, rabi, rotation)
        diff = wrap_phase(res.control_phase - res.half_solid_angle)
        print(f"{ratio:>14.2f} {res.control_phase:>13.6f} "
              f"{res.half_solid_angle:>17.6f} {diff:>11.1e}")
    print("on resonance both sides give pi: the minus sign a spin picks up "
          "under a full turn.\n")

    model = ReadoutModel()
    print(f"single-cycle readout: P(up|up) = {model.p_read_up_given_up}, "
          f"P(up|down) = {model.p_read_up_given_down}")
    print("majority vote contrast vs number of cycles:")
    for n in (1, 3, 5, 7, 9, 11):
        print(f"  n = {n:2d}: contrast = {qnd_contrast(n, model):.4f}")

    rng = np.random.default_rng(33)
    shots = 2000
    ups = sum(
        qnd_readout(density(ket("du")), rng, model)[0] for _ in range(shots)
    )
    downs = sum(
        qnd_readout(density(ket("dd")), rng, model)[0] for _ in range(shots)
    )
    sampled = ups / shots - downs / shots
    print(f"\nsampled contrast at n = 11, {shots} shots per state: "
          f"{sampled:.4f}")
    print(f"analytic value: {qnd_contrast(11, model):.4f}")


if __name__ == "__main__":
    main()
