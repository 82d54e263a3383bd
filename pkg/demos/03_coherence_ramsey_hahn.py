"""Dephasing experiments and the exchange null result.

A Ramsey decay under quasi-static Gaussian detuning noise has the
closed-form T2* = sqrt(2) / (2 pi sigma), which the sampled curve and its
fit reproduce. A Hahn echo refocuses quasi-static noise completely, so
any echo decay needs dynamics within one shot. Finally, turning the
line's exchange sensitivity on and off changes nothing when the exchange
itself does not fluctuate: the fitted times agree shot for shot.
"""

import numpy as np

from donorsim.coherence import (
    analytic_t2star,
    fit_ramsey,
    hahn_experiment,
    ideal_hahn_curve,
    ramsey_experiment,
)
from donorsim.noise import NoiseParams


def main() -> None:
    sigma = 0.1
    noise = NoiseParams(sigma_detuning_q2=sigma)
    taus = np.linspace(0.05, 8.0, 40)
    result = ramsey_experiment(
        taus, noise, shots=5000, rng=np.random.default_rng(7),
        detuning_mhz=1.0, target="Q2", sample=True,
    )
    fit = fit_ramsey(taus, result.p_up_sampled)
    print(f"Ramsey, sigma = {sigma} MHz, 5000 shots per delay:")
    print(f"  fitted  T2* = {fit['t2_star_us']:.3f} +- {fit['t2_star_err_us']:.3f} us")
    print(f"  analytic T2* = {analytic_t2star(sigma):.3f} us")

    taus_h = np.linspace(1.0, 400.0, 25)
    echo = hahn_experiment(
        taus_h, NoiseParams(sigma_detuning_q2=0.2), shots=5000,
        rng=np.random.default_rng(9), sweep_mhz=0.5, sample=False,
    )
    gap = float(np.abs(echo.p_up - ideal_hahn_curve(taus_h, 0.5)).max())
    print(f"\nHahn echo under quasi-static noise only: deviation from the "
          f"undamped curve = {gap:.1e}")
    print("(the echo refocuses every shot exactly; decay needs in-shot dynamics)")

    print("\nexchange sensitivity on vs off, with no exchange noise:")
    null_noise = NoiseParams(sigma_detuning_q2=sigma, sigma_j=0.0)
    for j_weight in (-0.5, 0.0):
        res = ramsey_experiment(
            taus, null_noise, shots=5000, rng=np.random.default_rng(11),
            detuning_mhz=1.0, target="Q2", j_weight=j_weight, sample=True,
        )
        f = fit_ramsey(taus, res.p_up_sampled)
        tag = "on " if j_weight else "off"
        print(f"  J {tag}: T2* = {f['t2_star_us']:.6f} us")
    print("identical to the last digit: the exchange term only matters once "
          "sigma_J > 0")


if __name__ == "__main__":
    main()
