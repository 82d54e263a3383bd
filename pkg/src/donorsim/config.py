"""Experiment configuration: loading, validation, and canonical hashing.

One YAML file describes one experiment run.  Top-level keys:

    experiment   one of EXPERIMENT_KINDS (required)
    seed         master RNG seed, integer (required; no wall-clock default)
    shots        samples per point / circuit (required for sampled kinds)
    physics      SpinSystemParams overrides (b0_tesla, g1, g2, a1_mhz,
                 a2_mhz, j_mhz)
    nuclei       two-item list, each 'up' or 'down'
    noise        quasi-static NoiseParams for ramsey / hahn
    readout      electron readout confusion (p_read_up_given_up / _down)
    sweep        the experiment's grid (kind-specific keys)
    options      remaining kind-specific knobs
    output       prefix (file stem) and csv (also emit per-curve CSV)

Unit-bearing keys spell the unit in their name (``_mhz``, ``_us``, ``_s``,
``_rad``, ``_tesla``).  `validate_mapping` reports every structural and
range problem at once rather than stopping at the first; physically suspect
but runnable settings (e.g. exchange exceeding the hyperfine detuning) come
back as warnings, not errors.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .measure import ReadoutModel
from .noise import NoiseParams
from .spin import NuclearConfig, SpinSystemParams

EXPERIMENT_KINDS: dict[str, str] = {
    "spectrum": "four ESR line positions from the static Hamiltonian",
    "ramsey": "free-induction decay of one electron under quasi-static noise",
    "hahn": "Hahn echo decay with telegraph and exposure-channel noise",
    "bell-tomography": "Bell-state preparation and phase-reversal tomography",
    "gst-1q-uncond": "single-qubit GST, unconditional rotations, per spectator state",
    "gst-1q-cond": "single-qubit GST of each conditional rotation configuration",
    "gst-2q": "two-qubit GST of the full nine-gate set",
    "geometric-phase": "control-qubit phase versus target-trajectory solid angle",
}

_SAMPLED_KINDS = frozenset(
    {"ramsey", "hahn", "bell-tomography", "gst-1q-uncond", "gst-1q-cond", "gst-2q"}
)
_GST_KINDS = frozenset({"gst-1q-uncond", "gst-1q-cond", "gst-2q"})

_TOP_KEYS = frozenset(
    {
        "experiment",
        "seed",
        "shots",
        "physics",
        "nuclei",
        "noise",
        "readout",
        "sweep",
        "options",
        "output",
    }
)
_PHYSICS_KEYS = frozenset({"b0_tesla", "g1", "g2", "a1_mhz", "a2_mhz", "j_mhz"})
_NOISE_KEYS = frozenset(
    {
        "sigma_detuning_q1_mhz",
        "sigma_detuning_q2_mhz",
        "sigma_j_mhz",
        "jump_amplitudes_mhz",
        "jump_rate",
        "t1_s",
        "t2_hahn_us",
    }
)
_READOUT_KEYS = frozenset({"p_read_up_given_up", "p_read_up_given_down"})
_OUTPUT_KEYS = frozenset({"prefix", "csv"})

_SWEEP_KEYS: dict[str, frozenset[str]] = {
    "spectrum": frozenset(),
    "ramsey": frozenset({"tau_min_us", "tau_max_us", "n_points"}),
    "hahn": frozenset({"tau_min_us", "tau_max_us", "n_points"}),
    "bell-tomography": frozenset({"n_phases", "phase_max_rad"}),
    "gst-1q-uncond": frozenset({"max_lengths"}),
    "gst-1q-cond": frozenset({"max_lengths"}),
    "gst-2q": frozenset({"max_lengths"}),
    "geometric-phase": frozenset({"detuning_max_mhz", "n_points"}),
}

_OPTION_KEYS: dict[str, frozenset[str]] = {
    "spectrum": frozenset(),
    "ramsey": frozenset({"target", "detuning_mhz", "j_weight", "sample"}),
    "hahn": frozenset({"sweep_mhz", "j_weight", "sample"}),
    "bell-tomography": frozenset(
        {
            "prep_error",
            "post_prep_depol",
            "t1_us",
            "t2_us",
            "depol_rate_per_us",
            "control_dephasing",
            "spam_correction",
            "mode",
        }
    ),
    "gst-1q-uncond": frozenset(
        {
            "incoherent_scale",
            "coherent_scale",
            "depol_rate_per_us",
            "control_dephasing",
            "mode",
        }
    ),
    "gst-1q-cond": frozenset(
        {
            "incoherent_scale",
            "coherent_scale",
            "depol_rate_per_us",
            "control_dephasing",
            "mode",
        }
    ),
    "gst-2q": frozenset(
        {
            "incoherent_scale",
            "coherent_scale",
            "depol_rate_per_us",
            "control_dephasing",
            "mode",
        }
    ),
    "geometric-phase": frozenset({"rabi_mhz", "rotation_rad"}),
}

# Sections an experiment kind never reads; flagged as warnings so a copied
# config does not silently carry dead settings.
_UNUSED_SECTIONS: dict[str, tuple[str, ...]] = {
    "spectrum": ("noise", "readout", "shots"),
    "ramsey": (),
    "hahn": (),
    "bell-tomography": ("noise",),
    "gst-1q-uncond": ("noise", "readout"),
    "gst-1q-cond": ("noise", "readout"),
    "gst-2q": ("noise", "readout"),
    "geometric-phase": ("noise", "readout", "shots", "physics", "nuclei"),
}


@dataclass(frozen=True)
class ValidationReport:
    """Everything wrong (errors) or suspect (warnings) with a config."""

    errors: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment description, ready for the runner."""

    kind: str
    seed: int
    shots: int | None
    physics: SpinSystemParams
    nuclei: NuclearConfig
    noise: NoiseParams
    readout: ReadoutModel | None
    sweep: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output_prefix: str = "result"
    output_csv: bool = False
    raw: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    """SHA-256 of the canonical JSON form of the effective config."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_mapping(path: str | Path) -> dict:
    """Parse a YAML config file into a plain mapping.

    Raises ValueError for unreadable or non-mapping documents; validation
    of the contents is `validate_mapping`'s job.
    """
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValueError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a mapping, got {type(raw).__name__}")
    return raw


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _check_number(
    errors: list[str],
    section: dict,
    prefix: str,
    key: str,
    minimum: float | None = None,
    maximum: float | None = None,
    strict_min: bool = False,
) -> None:
    if key not in section:
        return
    value = section[key]
    path = f"{prefix}{key}"
    if not _is_num(value):
        errors.append(f"{path}: expected a number, got {value!r}")
        return
    if minimum is not None and (value <= minimum if strict_min else value < minimum):
        bound = "greater than" if strict_min else "at least"
        errors.append(f"{path}: must be {bound} {minimum}, got {value}")
    if maximum is not None and value > maximum:
        errors.append(f"{path}: must be at most {maximum}, got {value}")


def _check_section_keys(
    errors: list[str], raw: dict, name: str, allowed: frozenset[str]
) -> dict:
    section = raw.get(name)
    if section is None:
        return {}
    if not isinstance(section, dict):
        errors.append(f"{name}: expected a mapping, got {type(section).__name__}")
        return {}
    for key in sorted(set(section) - allowed):
        errors.append(f"{name}.{key}: unknown key")
    return section


def validate_mapping(raw: dict) -> ValidationReport:
    """Collect all structural and range problems in one pass."""
    errors: list[str] = []
    warnings: list[str] = []

    kind = raw.get("experiment")
    if kind is None:
        errors.append("experiment: required field is missing")
    elif kind not in EXPERIMENT_KINDS:
        errors.append(
            f"experiment: unknown kind {kind!r}; expected one of "
            + ", ".join(sorted(EXPERIMENT_KINDS))
        )
        kind = None

    for key in sorted(set(raw) - _TOP_KEYS):
        errors.append(f"{key}: unknown key")

    seed = raw.get("seed")
    if seed is None:
        errors.append("seed: required field is missing")
    elif not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        errors.append(f"seed: must be a non-negative integer, got {seed!r}")

    shots = raw.get("shots")
    if shots is not None and (
        not isinstance(shots, int) or isinstance(shots, bool) or shots <= 0
    ):
        errors.append(f"shots: must be a positive integer, got {shots!r}")
    if kind in _SAMPLED_KINDS and shots is None:
        errors.append(f"shots: required for experiment {kind!r}")

    physics = _check_section_keys(errors, raw, "physics", _PHYSICS_KEYS)
    _check_number(errors, physics, "physics.", "b0_tesla", minimum=0, strict_min=True)
    _check_number(errors, physics, "physics.", "a1_mhz", minimum=0)
    _check_number(errors, physics, "physics.", "a2_mhz", minimum=0)
    _check_number(errors, physics, "physics.", "j_mhz", minimum=0)
    for key in ("g1", "g2"):
        _check_number(errors, physics, "physics.", key, minimum=0, strict_min=True)
    a1 = physics.get("a1_mhz", SpinSystemParams().a1)
    a2 = physics.get("a2_mhz", SpinSystemParams().a2)
    j = physics.get("j_mhz", SpinSystemParams().j)
    if all(_is_num(v) and v >= 0 for v in (a1, a2, j)):
        abar = 0.5 * (a1 + a2)
        if abar > 0 and j >= 0.5 * abar:
            warnings.append(
                f"physics.j_mhz: exchange {j} MHz is not small against the "
                f"hyperfine detuning {abar} MHz; the weak-exchange regime "
                "(conditional addressing, QND readout) degrades"
            )

    nuclei = raw.get("nuclei")
    if nuclei is not None:
        if (
            not isinstance(nuclei, (list, tuple))
            or len(nuclei) != 2
            or any(n not in ("up", "down") for n in nuclei)
        ):
            errors.append(
                f"nuclei: expected a two-item list of 'up'/'down', got {nuclei!r}"
            )

    noise = _check_section_keys(errors, raw, "noise", _NOISE_KEYS)
    for key in ("sigma_detuning_q1_mhz", "sigma_detuning_q2_mhz", "sigma_j_mhz"):
        _check_number(errors, noise, "noise.", key, minimum=0)
    _check_number(errors, noise, "noise.", "jump_rate", minimum=0, maximum=1)
    _check_number(errors, noise, "noise.", "t1_s", minimum=0, strict_min=True)
    _check_number(errors, noise, "noise.", "t2_hahn_us", minimum=0, strict_min=True)
    amps = noise.get("jump_amplitudes_mhz")
    if amps is not None and (
        not isinstance(amps, (list, tuple)) or any(not _is_num(a) or a < 0 for a in amps)
    ):
        errors.append(
            f"noise.jump_amplitudes_mhz: expected a list of non-negative numbers, got {amps!r}"
        )

    readout = _check_section_keys(errors, raw, "readout", _READOUT_KEYS)
    for key in _READOUT_KEYS:
        _check_number(errors, readout, "readout.", key, minimum=0, maximum=1)
    if readout:
        pu = readout.get("p_read_up_given_up")
        pd = readout.get("p_read_up_given_down")
        if _is_num(pu) and _is_num(pd) and pu <= pd:
            errors.append(
                "readout.p_read_up_given_up: must exceed p_read_up_given_down "
                f"(got {pu} vs {pd})"
            )

    output = _check_section_keys(errors, raw, "output", _OUTPUT_KEYS)
    if "prefix" in output and not isinstance(output["prefix"], str):
        errors.append(f"output.prefix: expected a string, got {output['prefix']!r}")
    if "csv" in output and not isinstance(output["csv"], bool):
        errors.append(f"output.csv: expected true/false, got {output['csv']!r}")

    if kind is not None:
        _validate_kind_sections(errors, warnings, raw, kind)

    return ValidationReport(tuple(errors), tuple(warnings))


def _validate_kind_sections(
    errors: list[str], warnings: list[str], raw: dict, kind: str
) -> None:
    sweep = _check_section_keys(errors, raw, "sweep", _SWEEP_KEYS[kind])
    options = _check_section_keys(errors, raw, "options", _OPTION_KEYS[kind])

    for section in _UNUSED_SECTIONS[kind]:
        if raw.get(section) is not None:
            warnings.append(f"{section}: not used by experiment {kind!r}; ignored")

    if kind in ("ramsey", "hahn"):
        if "tau_max_us" not in sweep:
            errors.append(f"sweep.tau_max_us: required for experiment {kind!r}")
        _check_number(errors, sweep, "sweep.", "tau_max_us", minimum=0, strict_min=True)
        _check_number(errors, sweep, "sweep.", "tau_min_us", minimum=0)
        _check_int(errors, sweep, "sweep.n_points", minimum=4)
        if (
            _is_num(sweep.get("tau_min_us"))
            and _is_num(sweep.get("tau_max_us"))
            and sweep["tau_min_us"] >= sweep["tau_max_us"]
        ):
            errors.append("sweep.tau_min_us: must be below tau_max_us")
        target = options.get("target")
        if target is not None and target not in ("Q1", "Q2"):
            errors.append(f"options.target: expected 'Q1' or 'Q2', got {target!r}")
        _check_number(errors, options, "options.", "detuning_mhz")
        _check_number(errors, options, "options.", "sweep_mhz")
        _check_number(errors, options, "options.", "j_weight")
        _check_bool(errors, options, "options.sample")

    elif kind == "bell-tomography":
        _check_int(errors, sweep, "sweep.n_phases", minimum=5)
        _check_number(
            errors, sweep, "sweep.", "phase_max_rad", minimum=math.pi
        )
        prep_error = options.get("prep_error")
        if prep_error is not None:
            pair = prep_error if isinstance(prep_error, (list, tuple)) else [prep_error]
            if len(pair) not in (1, 2) or any(
                not _is_num(p) or not 0 <= p <= 1 for p in pair
            ):
                errors.append(
                    "options.prep_error: expected a probability or a pair of "
                    f"probabilities, got {prep_error!r}"
                )
        _check_number(errors, options, "options.", "post_prep_depol", minimum=0, maximum=1)
        _check_number(errors, options, "options.", "t1_us", minimum=0, strict_min=True)
        _check_number(errors, options, "options.", "t2_us", minimum=0, strict_min=True)
        _check_number(errors, options, "options.", "depol_rate_per_us", minimum=0)
        _check_number(errors, options, "options.", "control_dephasing", minimum=0, maximum=0.5)
        _check_bool(errors, options, "options.spam_correction")
        _check_mode(errors, options)

    elif kind in _GST_KINDS:
        lengths = sweep.get("max_lengths")
        if lengths is not None:
            if (
                not isinstance(lengths, (list, tuple))
                or not lengths
                or any(not isinstance(n, int) or isinstance(n, bool) or n < 1 for n in lengths)
                or list(lengths) != sorted(lengths)
            ):
                errors.append(
                    "sweep.max_lengths: expected an ascending list of integers >= 1, "
                    f"got {lengths!r}"
                )
        _check_number(errors, options, "options.", "incoherent_scale", minimum=0)
        _check_number(errors, options, "options.", "coherent_scale", minimum=0)
        _check_number(errors, options, "options.", "depol_rate_per_us", minimum=0)
        _check_number(errors, options, "options.", "control_dephasing", minimum=0, maximum=0.5)
        _check_mode(errors, options)

    elif kind == "geometric-phase":
        _check_number(errors, options, "options.", "rabi_mhz", minimum=0, strict_min=True)
        _check_number(errors, options, "options.", "rotation_rad", minimum=0)
        _check_int(errors, sweep, "sweep.n_points", minimum=2)
        rabi = options.get("rabi_mhz", 0.2)
        _check_number(errors, sweep, "sweep.", "detuning_max_mhz", minimum=0, strict_min=True)
        dmax = sweep.get("detuning_max_mhz")
        if _is_num(dmax) and _is_num(rabi) and dmax >= 2.0 * rabi:
            errors.append(
                f"sweep.detuning_max_mhz: must stay below 2 * rabi_mhz = {2.0 * rabi}, "
                f"got {dmax}"
            )


def _check_int(errors: list[str], section: dict, path: str, minimum: int) -> None:
    key = path.split(".")[-1]
    if key not in section:
        return
    value = section[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        errors.append(f"{path}: must be an integer >= {minimum}, got {value!r}")


def _check_bool(errors: list[str], section: dict, path: str) -> None:
    key = path.split(".")[-1]
    if key in section and not isinstance(section[key], bool):
        errors.append(f"{path}: expected true/false, got {section[key]!r}")


def _check_mode(errors: list[str], options: dict) -> None:
    mode = options.get("mode")
    if mode is not None and mode not in ("ideal", "pulse"):
        errors.append(f"options.mode: expected 'ideal' or 'pulse', got {mode!r}")


def build_config(raw: dict, default_prefix: str = "result") -> ExperimentConfig:
    """Turn a validated mapping into typed experiment inputs.

    Call `validate_mapping` first; this constructor trusts its input and
    only converts representations.
    """
    physics = raw.get("physics") or {}
    params = SpinSystemParams(
        b0=physics.get("b0_tesla", SpinSystemParams().b0),
        g1=physics.get("g1", SpinSystemParams().g1),
        g2=physics.get("g2", SpinSystemParams().g2),
        a1=physics.get("a1_mhz", SpinSystemParams().a1),
        a2=physics.get("a2_mhz", SpinSystemParams().a2),
        j=physics.get("j_mhz", SpinSystemParams().j),
    )
    nuclei_raw = raw.get("nuclei")
    nucs = NuclearConfig(*nuclei_raw) if nuclei_raw else NuclearConfig()

    noise_raw = raw.get("noise") or {}
    noise = NoiseParams(
        sigma_detuning_q1=noise_raw.get("sigma_detuning_q1_mhz", 0.0),
        sigma_detuning_q2=noise_raw.get("sigma_detuning_q2_mhz", 0.0),
        sigma_j=noise_raw.get("sigma_j_mhz", 0.0),
        jump_amplitudes=tuple(noise_raw.get("jump_amplitudes_mhz", ())),
        jump_rate=noise_raw.get("jump_rate", 0.0),
        t1_s=noise_raw.get("t1_s", math.inf),
        t2_hahn_us=noise_raw.get("t2_hahn_us", math.inf),
    )

    readout_raw = raw.get("readout")
    readout = (
        ReadoutModel(
            p_read_up_given_up=readout_raw.get("p_read_up_given_up", 0.74),
            p_read_up_given_down=readout_raw.get("p_read_up_given_down", 0.26),
        )
        if readout_raw
        else None
    )

    output = raw.get("output") or {}
    return ExperimentConfig(
        kind=raw["experiment"],
        seed=raw["seed"],
        shots=raw.get("shots"),
        physics=params,
        nuclei=nucs,
        noise=noise,
        readout=readout,
        sweep=dict(raw.get("sweep") or {}),
        options=dict(raw.get("options") or {}),
        output_prefix=output.get("prefix", default_prefix),
        output_csv=output.get("csv", False),
        raw=raw,
    )


def load_config(path: str | Path, seed_override: int | None = None) -> ExperimentConfig:
    """Load + validate + build in one step; raises ValueError on errors."""
    raw = load_mapping(path)
    if seed_override is not None:
        raw = {**raw, "seed": seed_override}
    report = validate_mapping(raw)
    if not report.ok:
        raise ValueError("; ".join(report.errors))
    return build_config(raw, default_prefix=Path(path).stem)
