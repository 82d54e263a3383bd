"""Simulated count data for GST circuits.

A Dataset maps each circuit to integer outcome counts. Counts come from
multinomial sampling of the gate set's outcome probabilities, so the
same seed reproduces the same dataset bit for bit. The text format is
one circuit per line and survives a save/load round trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .design import Circuit
from .gatesets import GateSet


@dataclass
class Dataset:
    outcome_labels: tuple[str, ...]
    counts: dict[Circuit, np.ndarray] = field(default_factory=dict)

    @property
    def circuits(self) -> list[Circuit]:
        return list(self.counts)

    @property
    def total_shots(self) -> int:
        return int(sum(c.sum() for c in self.counts.values()))

    def fractions(self, circuit: Circuit) -> np.ndarray:
        c = self.counts[circuit]
        return c / c.sum()

    def save(self, path: str | Path) -> None:
        lines = ["# circuit " + " ".join(self.outcome_labels)]
        for circuit, counts in self.counts.items():
            name = "{}" if not circuit else ":".join(circuit)
            lines.append(name + "  " + " ".join(str(int(n)) for n in counts))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Dataset":
        lines = Path(path).read_text().splitlines()
        header = lines[0]
        if not header.startswith("# circuit "):
            raise ValueError(f"unrecognized dataset header: {header!r}")
        labels = tuple(header.removeprefix("# circuit ").split())
        counts: dict[Circuit, np.ndarray] = {}
        for line in lines[1:]:
            if not line.strip():
                continue
            name, *values = line.split()
            circuit: Circuit = () if name == "{}" else tuple(name.split(":"))
            row = np.array([int(v) for v in values], dtype=np.int64)
            if row.size != len(labels):
                raise ValueError(f"bad count row for circuit {name!r}")
            counts[circuit] = row
        return cls(outcome_labels=labels, counts=counts)


def simulate_counts(
    gateset: GateSet,
    circuits: list[Circuit],
    shots: int = 1000,
    rng: int | np.random.Generator = 0,
) -> Dataset:
    """Multinomial counts for each circuit under the given gate set."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    dataset = Dataset(outcome_labels=gateset.outcome_labels)
    for circuit in circuits:
        probs = gateset.probabilities(circuit)
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        dataset.counts[circuit] = gen.multinomial(shots, probs).astype(np.int64)
    return dataset


def exact_dataset(gateset: GateSet, circuits: list[Circuit], shots: int = 1000) -> Dataset:
    """Counts equal to shots * probability exactly; no sampling noise.

    Counts stay fractional, so this is for in-memory estimation checks
    (recovering the generating gate set), not for saving to disk.
    """
    dataset = Dataset(outcome_labels=gateset.outcome_labels)
    for circuit in circuits:
        probs = np.clip(gateset.probabilities(circuit), 0.0, None)
        dataset.counts[circuit] = shots * probs / probs.sum()
    return dataset
