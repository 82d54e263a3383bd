"""Quasi-static and telegraph noise processes for coherence experiments.

The detuning of a driven transition fluctuates through a Gaussian
quasi-static part (resampled each shot, frozen within a shot) plus a sum of
two-level telegraph terms, one per nearby 29Si nuclear coupling: each term
contributes +-a_k/2 and may flip at most once per shot, with probability
`jump_rate`, at a uniformly random moment of the shot's evolution window.
The sign persists between shots, so between-shot dynamics emerge from the
within-shot flip events. An exchange-coupled transition also inherits half
of any exchange fluctuation, weighted by `j_weight` in the experiment
functions.

Explicit T1 / pure-dephasing (T2) exposure channels complement the
classical detuning noise; the channel factories live in `superop.channel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseParams:
    """Noise strengths; frequencies in MHz, relaxation in seconds,
    coherence in microseconds (suffixes spell the units out)."""

    sigma_detuning_q1: float = 0.0
    sigma_detuning_q2: float = 0.0
    sigma_j: float = 0.0
    jump_amplitudes: tuple[float, ...] = ()
    jump_rate: float = 0.0
    t1_s: float = math.inf
    t2_hahn_us: float = math.inf

    def __post_init__(self) -> None:
        if min(self.sigma_detuning_q1, self.sigma_detuning_q2, self.sigma_j) < 0:
            raise ValueError("noise standard deviations must be non-negative")
        if not 0.0 <= self.jump_rate <= 1.0:
            raise ValueError("jump_rate is a per-shot probability")
        if any(a < 0 for a in self.jump_amplitudes):
            raise ValueError("jump amplitudes must be non-negative")
        if self.t1_s <= 0 or self.t2_hahn_us <= 0:
            raise ValueError("t1_s and t2_hahn_us must be positive")
        object.__setattr__(
            self, "jump_amplitudes", tuple(float(a) for a in self.jump_amplitudes)
        )

    @property
    def t1_us(self) -> float:
        return self.t1_s * 1e6


@dataclass(frozen=True)
class NoiseRealization:
    """One shot's frozen noise draw.

    telegraph_signs are the signs at the start of the shot; flip_fractions
    holds, per coupling, the fraction of the evolution window at which the
    sign flips, or nan when it does not flip this shot.
    """

    detuning_q1: float
    detuning_q2: float
    exchange_offset: float
    telegraph_signs: tuple[int, ...]
    flip_fractions: tuple[float, ...]

    def detuning(self, qubit: str = "Q2", j_weight: float = 0.0) -> float:
        """Static part of the line detuning for one electron (MHz)."""
        base = self.detuning_q1 if qubit == "Q1" else self.detuning_q2
        return base + j_weight * self.exchange_offset

    def telegraph_shift(self, amplitudes: tuple[float, ...], at_fraction: float) -> float:
        """Telegraph contribution at a given fraction of the window."""
        total = 0.0
        for a, s, f in zip(amplitudes, self.telegraph_signs, self.flip_fractions):
            sign = -s if (not math.isnan(f) and at_fraction >= f) else s
            total += 0.5 * a * sign
        return total


class NoiseSampler:
    """Stateful per-shot sampler; the shot sequence is reproducible from
    (params, seed). Telegraph signs are drawn uniformly at the first shot
    and then evolve through the per-shot flip events."""

    def __init__(self, params: NoiseParams, seed: int | np.random.Generator):
        self.params = params
        self.rng = (
            seed
            if isinstance(seed, np.random.Generator)
            else np.random.default_rng(seed)
        )
        k = len(params.jump_amplitudes)
        self._signs = (
            self.rng.choice([-1, 1], size=k) if k else np.zeros(0, dtype=int)
        )

    def next_shot(self) -> NoiseRealization:
        p = self.params
        rng = self.rng
        d1 = rng.normal(0.0, p.sigma_detuning_q1) if p.sigma_detuning_q1 > 0 else 0.0
        d2 = rng.normal(0.0, p.sigma_detuning_q2) if p.sigma_detuning_q2 > 0 else 0.0
        dj = rng.normal(0.0, p.sigma_j) if p.sigma_j > 0 else 0.0
        k = len(p.jump_amplitudes)
        signs = tuple(int(s) for s in self._signs)
        fracs = []
        for i in range(k):
            if p.jump_rate > 0 and rng.random() < p.jump_rate:
                fracs.append(float(rng.random()))
                self._signs[i] = -self._signs[i]
            else:
                fracs.append(math.nan)
        return NoiseRealization(
            detuning_q1=float(d1),
            detuning_q2=float(d2),
            exchange_offset=float(dj),
            telegraph_signs=signs,
            flip_fractions=tuple(fracs),
        )


def sample_realization(
    params: NoiseParams, rng: np.random.Generator
) -> NoiseRealization:
    """One stationary draw (telegraph signs uniform, flips per shot)."""
    return NoiseSampler(params, rng).next_shot()
