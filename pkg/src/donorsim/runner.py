"""Config-driven experiment execution and machine-readable results.

`run` dispatches one validated ExperimentConfig to the owning module and
returns ResultRecords; `write_records` lands them as line-delimited JSON
(one record per line) with optional per-curve CSV, written atomically
(temp file in the target directory, then rename).  Outputs carry the
config hash and embed units, and contain no timestamps or machine state,
so identical (config, seed) reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coherence import (
    analytic_t2star,
    fit_hahn,
    fit_ramsey,
    hahn_experiment,
    ramsey_experiment,
)
from .config import ExperimentConfig
from .geometric import geometric_phase_analysis, wrap_phase
from .gst.suite import make_noisy_device, run_paper_suite
from .measure import IDEAL_READOUT
from .pulses import DEFAULT_RABI_MHZ, CircuitNoise, bell_prep_circuit
from .spin import eigenstates, esr_frequencies, mixing_angle
from .tomography import run_bell_tomography


class RunnerError(RuntimeError):
    """A downstream failure, wrapped with the experiment's identity."""


@dataclass(frozen=True)
class ResultRecord:
    """One experiment outcome in a JSON-safe, lossless layout.

    scalars hold named metrics (numbers, strings, booleans); curves map a
    name to x / y / stderr arrays plus their units; matrices are flattened
    row-major with explicit dims.
    """

    experiment_id: str
    kind: str
    config_hash: str
    seed: int
    scalars: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "kind": self.kind,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "scalars": self.scalars,
            "curves": self.curves,
            "matrices": self.matrices,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRecord":
        return cls(**data)


def _curve(x, y, stderr=None, x_unit="", y_unit="") -> dict:
    x = [float(v) for v in np.asarray(x).ravel()]
    y = [float(v) for v in np.asarray(y).ravel()]
    err = (
        [0.0] * len(y)
        if stderr is None
        else [float(v) for v in np.asarray(stderr).ravel()]
    )
    return {"x": x, "y": y, "stderr": err, "units": {"x": x_unit, "y": y_unit}}


def _matrix(mat: np.ndarray, unit: str = "") -> dict:
    mat = np.asarray(mat, dtype=float)
    return {
        "data": [float(v) for v in mat.ravel(order="C")],
        "dims": list(mat.shape),
        "units": unit,
    }


def _binomial_err(p: np.ndarray, shots: int | None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not shots:
        return np.zeros_like(p)
    return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / shots)


# ---------------------------------------------------------------------------
# per-kind handlers; each returns a list of (suffix, scalars, curves,
# matrices, meta) tuples that run() wraps into ResultRecords


def _run_spectrum(cfg: ExperimentConfig, rng: np.random.Generator):
    sol = eigenstates(cfg.physics, cfg.nuclei)
    lines = esr_frequencies(cfg.physics, cfg.nuclei)
    by_key = {(target, control): f for f, target, control in lines}
    freqs = sorted(by_key.values())

    scalars = {
        "f_q1_control_down_mhz": by_key[("Q1", "down")],
        "f_q1_control_up_mhz": by_key[("Q1", "up")],
        "f_q2_control_down_mhz": by_key[("Q2", "down")],
        "f_q2_control_up_mhz": by_key[("Q2", "up")],
        "split_q1_mhz": by_key[("Q1", "up")] - by_key[("Q1", "down")],
        "split_q2_mhz": by_key[("Q2", "up")] - by_key[("Q2", "down")],
        "across_target_separation_mhz": 0.5
        * (
            by_key[("Q2", "down")]
            + by_key[("Q2", "up")]
            - by_key[("Q1", "down")]
            - by_key[("Q1", "up")]
        ),
        "cos_mixing_angle": math.cos(mixing_angle(cfg.physics)),
    }
    curves = {
        "spectrum_sticks": _curve(
            freqs, [1.0] * len(freqs), x_unit="MHz", y_unit="arb"
        )
    }
    matrices = {"eigenvalues": _matrix(sol.energies.reshape(1, -1), unit="MHz")}
    meta = {"nuclei": [cfg.nuclei.n1, cfg.nuclei.n2]}
    return [("", scalars, curves, matrices, meta)]


def _coherence_common(cfg: ExperimentConfig):
    sweep = cfg.sweep
    taus = np.linspace(
        sweep.get("tau_min_us", 0.0),
        sweep["tau_max_us"],
        sweep.get("n_points", 50),
    )
    # tau = 0 gives a degenerate fit point for the stretched-exponential
    # model; nudge onto the first resolvable delay
    if taus[0] == 0.0:
        taus[0] = taus[1] / 2.0 if len(taus) > 1 else 1e-3
    return taus, cfg.options.get("sample", True)


def _run_ramsey(cfg: ExperimentConfig, rng: np.random.Generator):
    taus, sample = _coherence_common(cfg)
    target = cfg.options.get("target", "Q2")
    result = ramsey_experiment(
        taus,
        cfg.noise,
        shots=cfg.shots,
        rng=rng,
        detuning_mhz=cfg.options.get("detuning_mhz", 1.0),
        target=target,
        j_weight=cfg.options.get("j_weight", 0.0),
        sample=sample,
        readout=cfg.readout,
    )
    p_up = result.p_up_sampled if sample else result.p_up
    fit = fit_ramsey(taus, p_up) if sample else result.fit

    sigma = (
        cfg.noise.sigma_detuning_q1 if target == "Q1" else cfg.noise.sigma_detuning_q2
    )
    sigma_eff = math.hypot(sigma, cfg.options.get("j_weight", 0.0) * cfg.noise.sigma_j)
    scalars = {
        "converged": fit.get("error") is None,
        "resolved": bool(fit.get("resolved", False)),
        "t2_star_us": fit.get("t2_star_us", float("nan")),
        "t2_star_err_us": fit.get("t2_star_err_us", float("nan")),
        "fringe_frequency_mhz": fit.get("frequency_mhz", float("nan")),
    }
    if not cfg.noise.jump_amplitudes and sigma_eff > 0:
        scalars["t2_star_analytic_us"] = analytic_t2star(sigma_eff)
    curves = {
        "ramsey": _curve(
            taus, p_up, _binomial_err(p_up, cfg.shots if sample else None),
            x_unit="us", y_unit="P(up)",
        )
    }
    meta = {"target": target, "shots": cfg.shots, "sampled": sample}
    return [("", scalars, curves, {}, meta)]


def _run_hahn(cfg: ExperimentConfig, rng: np.random.Generator):
    taus, sample = _coherence_common(cfg)
    result = hahn_experiment(
        taus,
        cfg.noise,
        shots=cfg.shots,
        rng=rng,
        sweep_mhz=cfg.options.get("sweep_mhz", 0.5),
        j_weight=cfg.options.get("j_weight", 0.0),
        sample=sample,
        readout=cfg.readout,
    )
    p_up = result.p_up_sampled if sample else result.p_up
    fit = fit_hahn(taus, p_up) if sample else result.fit

    scalars = {
        "converged": fit.get("error") is None,
        "resolved": bool(fit.get("resolved", False)),
        "t2_us": fit.get("t2_us", float("nan")),
        "t2_err_us": fit.get("t2_err_us", float("nan")),
        "stretch_exponent": fit.get("exponent", float("nan")),
    }
    curves = {
        "hahn": _curve(
            taus, p_up, _binomial_err(p_up, cfg.shots if sample else None),
            x_unit="us", y_unit="P(up)",
        )
    }
    meta = {"shots": cfg.shots, "sampled": sample}
    return [("", scalars, curves, {}, meta)]


def _run_bell_tomography(cfg: ExperimentConfig, rng: np.random.Generator):
    opts = cfg.options
    n_phases = cfg.sweep.get("n_phases", 41)
    phase_max = cfg.sweep.get("phase_max_rad", 2.0 * math.pi)
    phases = np.linspace(0.0, phase_max, n_phases)

    noise_keys = ("t1_us", "t2_us", "depol_rate_per_us", "control_dephasing")
    noise = None
    if any(k in opts for k in noise_keys):
        noise = CircuitNoise(
            t1=opts.get("t1_us", math.inf),
            t2=opts.get("t2_us", math.inf),
            depol_rate=opts.get("depol_rate_per_us", 0.0),
            control_dephasing=opts.get("control_dephasing", 0.0),
        )
    prep_error = opts.get("prep_error", 0.0)
    if isinstance(prep_error, (list, tuple)):
        prep_error = tuple(prep_error) if len(prep_error) == 2 else prep_error[0]

    out = run_bell_tomography(
        bell_prep_circuit(),
        phases,
        shots=cfg.shots,
        noise=noise,
        rng=rng,
        readout=cfg.readout or IDEAL_READOUT,
        prep_error=prep_error,
        post_prep_depol=opts.get("post_prep_depol", 0.0),
        apply_spam_correction=opts.get("spam_correction", True),
        params=cfg.physics,
        mode=opts.get("mode", "ideal"),
    )
    corners = out["corners"]
    rho = out["rho_physical"]
    scalars = {
        "converged": True,
        "bell_fidelity": out["fidelity"],
        "bell_fidelity_uncorrected": out["fidelity_uncorrected"],
        "concurrence": out["concurrence"],
        "raw_was_physical": bool(out["raw_was_physical"]),
        "coherence_bound_exceeded": bool(corners.bound_exceeded),
        "rho11_dd": corners.rho11,
        "rho44_uu": corners.rho44,
        "abs_rho14": abs(corners.rho14),
        "arg_rho14_rad": float(np.angle(corners.rho14)),
    }
    data = out["data"]
    err = _binomial_err
    curves = {
        "reversal_q1": _curve(
            data.phases, data.p_up_q1, err(data.p_up_q1, data.shots),
            x_unit="rad", y_unit="P(up)",
        ),
        "reversal_q2": _curve(
            data.phases, data.p_up_q2, err(data.p_up_q2, data.shots),
            x_unit="rad", y_unit="P(up)",
        ),
    }
    matrices = {
        "rho_physical_real": _matrix(rho.real),
        "rho_physical_imag": _matrix(rho.imag),
        "populations": _matrix(
            np.asarray(out["populations"], dtype=float).reshape(1, -1)
        ),
    }
    meta = {
        "spam_corrected": bool(opts.get("spam_correction", True)),
        "shots": cfg.shots,
        "basis_order": ["uu", "ud", "du", "dd"],
        "population_order": ["dd", "du", "ud", "uu"],
    }
    return [("", scalars, curves, matrices, meta)]


_GST_MODES = {
    "gst-1q-uncond": "uncond-1q",
    "gst-1q-cond": "cond-1q",
    "gst-2q": "2q",
}


def _run_gst(cfg: ExperimentConfig, rng: np.random.Generator):
    opts = cfg.options
    device = make_noisy_device(
        incoherent_scale=opts.get("incoherent_scale", 1.0),
        coherent_scale=opts.get("coherent_scale", 1.0),
        **(
            {"depol_rate": opts["depol_rate_per_us"]}
            if "depol_rate_per_us" in opts
            else {}
        ),
        **(
            {"control_dephasing": opts["control_dephasing"]}
            if "control_dephasing" in opts
            else {}
        ),
        params=cfg.physics,
        nucs=cfg.nuclei,
        mode=opts.get("mode", "ideal"),
    )
    mode = _GST_MODES[cfg.kind]
    lengths_kw = {}
    if "max_lengths" in cfg.sweep:
        lengths = tuple(cfg.sweep["max_lengths"])
        lengths_kw = (
            {"max_lengths_2q": lengths}
            if mode == "2q"
            else {"max_lengths_1q": lengths}
        )
    report = run_paper_suite(
        mode, device, shots=cfg.shots, rng=np.random.SeedSequence(cfg.seed), **lengths_kw
    )

    results = []
    for run in report["runs"]:
        scalars = {
            "converged": bool(run["converged"]),
            "n_iterations": run["n_iterations"],
            "n_circuits": run["n_circuits"],
        }
        for label, f in run["fidelities"].items():
            scalars[f"f_avg.{label}"] = f
        for label, gate in run["budget"]["gates"].items():
            for key in (
                "infidelity",
                "coherent_infidelity",
                "incoherent_infidelity",
                "incoherent_fraction",
                "generator_fidelity",
                "over_rotation",
                "axis_misalignment",
                "dephasing",
                "depolarization",
            ):
                scalars[f"{key}.{label}"] = gate[key]
            for basis_label, value in gate["hamiltonian"].items():
                scalars[f"h.{label}.{basis_label}"] = value
            for basis_label, value in gate["stochastic"].items():
                scalars[f"s.{label}.{basis_label}"] = value
        for pair, value in run["budget"]["relational_misalignment"].items():
            scalars[f"relational_misalignment_rad.{pair}"] = value
        meta = {
            k: run[k]
            for k in run
            if k not in ("fidelities", "budget", "converged", "n_iterations", "n_circuits")
        }
        meta["mode"] = mode
        meta["warnings"] = {
            label: gate["warning"]
            for label, gate in run["budget"]["gates"].items()
            if gate["warning"]
        }
        results.append((run["name"], scalars, {}, {}, meta))
    return results


def _run_geometric_phase(cfg: ExperimentConfig, rng: np.random.Generator):
    rabi = cfg.options.get("rabi_mhz", DEFAULT_RABI_MHZ)
    rotation = cfg.options.get("rotation_rad", 2.0 * math.pi)
    n = cfg.sweep.get("n_points", 13)
    dmax = cfg.sweep.get("detuning_max_mhz", 0.3 * rabi)
    detunings = np.linspace(0.0, dmax, n)

    control, half_angle, dynamical = [], [], []
    trajectory = None
    for d in detunings:
        res = geometric_phase_analysis(d, rabi, rotation)
        control.append(res.control_phase)
        half_angle.append(res.half_solid_angle)
        dynamical.append(res.dynamical_phase)
        trajectory = res.trajectory

    control = np.array(control)
    half_angle = np.array(half_angle)
    deviation = np.abs(np.array([wrap_phase(c - h) for c, h in zip(control, half_angle)]))
    scalars = {
        "converged": True,
        "max_abs_deviation_rad": float(deviation.max()),
        "phase_shift_at_max_detuning_rad": wrap_phase(control[-1] - control[0]),
        "rabi_mhz": rabi,
        "rotation_rad": rotation,
    }
    curves = {
        "control_phase": _curve(detunings, control, x_unit="MHz", y_unit="rad"),
        "half_solid_angle": _curve(detunings, half_angle, x_unit="MHz", y_unit="rad"),
        "dynamical_phase": _curve(detunings, dynamical, x_unit="MHz", y_unit="rad"),
    }
    # Bloch trajectory at the largest detuning, decimated for the record
    step = max(1, len(trajectory) // 64)
    matrices = {"trajectory_max_detuning": _matrix(trajectory[::step])}
    return [("", scalars, curves, matrices, {})]


_HANDLERS = {
    "spectrum": _run_spectrum,
    "ramsey": _run_ramsey,
    "hahn": _run_hahn,
    "bell-tomography": _run_bell_tomography,
    "gst-1q-uncond": _run_gst,
    "gst-1q-cond": _run_gst,
    "gst-2q": _run_gst,
    "geometric-phase": _run_geometric_phase,
}


def run(config: ExperimentConfig) -> list[ResultRecord]:
    """Execute one experiment; deterministic given (config, seed)."""
    handler = _HANDLERS[config.kind]
    rng = np.random.default_rng(config.seed)
    try:
        raw_records = handler(config, rng)
    except (ValueError, RuntimeError, KeyError, np.linalg.LinAlgError) as exc:
        raise RunnerError(f"experiment {config.kind!r} failed: {exc}") from exc

    records = []
    for suffix, scalars, curves, matrices, meta in raw_records:
        experiment_id = config.kind if not suffix else f"{config.kind}/{suffix}"
        records.append(
            ResultRecord(
                experiment_id=experiment_id,
                kind=config.kind,
                config_hash=config.config_hash,
                seed=config.seed,
                scalars=scalars,
                curves=curves,
                matrices=matrices,
                meta=meta,
            )
        )
    return records


def all_converged(records: list[ResultRecord]) -> bool:
    return all(r.scalars.get("converged", True) for r in records)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_records(
    records: list[ResultRecord],
    out_dir: str | Path,
    prefix: str,
    csv_curves: bool = False,
) -> list[Path]:
    """Write one JSONL file (and optional per-curve CSVs); returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    lines = [
        json.dumps(
            record.to_dict(),
            sort_keys=True,
            separators=(",", ":"),
            default=_json_default,
        )
        for record in records
    ]
    jsonl_path = out_dir / f"{prefix}.jsonl"
    _atomic_write(jsonl_path, "\n".join(lines) + "\n")
    paths.append(jsonl_path)

    if csv_curves:
        for record in records:
            suffix = record.experiment_id.split("/", 1)
            tag = f"{prefix}.{suffix[1]}" if len(suffix) == 2 else prefix
            for name, curve in record.curves.items():
                csv_path = out_dir / f"{tag}.{name}.csv"
                _atomic_write(csv_path, _curve_csv(curve))
                paths.append(csv_path)
    return paths


def _json_default(value):
    # np.float64 is a float subclass and serializes on its own; integer and
    # boolean numpy scalars are not
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def _curve_csv(curve: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [f"x[{curve['units']['x']}]", f"y[{curve['units']['y']}]", "stderr"]
    )
    for x, y, e in zip(curve["x"], curve["y"], curve["stderr"]):
        writer.writerow([repr(x), repr(y), repr(e)])
    return buf.getvalue()


def read_records(path: str | Path) -> list[ResultRecord]:
    """Inverse of write_records for the JSONL file."""
    records = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            records.append(ResultRecord.from_dict(json.loads(line)))
    return records
