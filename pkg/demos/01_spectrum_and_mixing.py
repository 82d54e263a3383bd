"""Where the four ESR lines come from.

Two donor electrons share one always-on exchange coupling that is weak
against the hyperfine detuning between them, so each electron keeps its
own pair of resonance lines: one for each state of the other electron.
The exchange sets the 12 MHz gap inside each pair, the mean hyperfine
coupling sets the 112 MHz gap between the pairs, and the weak mixing of
the central levels shows up only as cos(theta) slightly below one.
"""

import math

from donorsim.spin import (
    SpinSystemParams,
    eigenstates,
    esr_frequencies,
    mixing_angle,
)


def main() -> None:
    params = SpinSystemParams()
    print(f"B0 = {params.b0} T, A1 = {params.a1} MHz, A2 = {params.a2} MHz, "
          f"J = {params.j} MHz")

    theta = mixing_angle(params)
    print(f"\nmixing angle: tan(2 theta) = J / Abar = {params.j / 112.0:.6f}")
    print(f"cos(theta)  = {math.cos(theta):.10f}")

    sol = eigenstates(params)
    print("\nelectron-sector eigenvalues (MHz, nuclei up/down):")
    for energy in sol.energies:
        print(f"  {energy:+14.6f}")

    print("\nESR lines (MHz):")
    lines = sorted(esr_frequencies(params), key=lambda row: row[0])
    for freq, target, control in lines:
        print(f"  {freq:14.6f}  drives {target} when the other electron is {control}")

    by_key = {(t, c): f for f, t, c in lines}
    split = by_key[("Q1", "up")] - by_key[("Q1", "down")]
    separation = by_key[("Q1", "down")] - by_key[("Q2", "down")]
    print(f"\nwithin-target splitting : {split:.6f} MHz (the exchange coupling)")
    print(f"across-target separation: {separation:.6f} MHz (the mean hyperfine "
          "coupling, plus the small exchange correction)")


if __name__ == "__main__":
    main()
