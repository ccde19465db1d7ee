"""Generator configuration: defaults, loading, validation and serialization.

Config files are JSON documents. Nested groups may be written either as
nested objects or as flat dotted keys (``"sensitivities.stress_persistence"``);
both forms are flattened before being applied on top of the defaults.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .population import CHRONOTYPES, PROFESSIONS, WORK_MODES

INTERVENTION_TYPES = ("vacation", "sick_leave", "workload_cap", "lifestyle_program")

MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    """Raised when a config file cannot be parsed or fails validation."""

    def __init__(self, message: str, field_name: str | None = None):
        super().__init__(message)
        self.field_name = field_name


def _default_noise_scales() -> dict[str, float]:
    return {
        "work_hours": 0.7,
        "stress": 1.5,
        "sleep_hours": 0.6,
        "exercise": 15.0,
        "outdoor": 20.0,
        "caffeine": 40.0,
        "diet_quality": 1.0,
        "screen_time": 1.0,
        "mood": 0.8,
        "energy": 0.8,
        "focus": 0.8,
        "intake": 150.0,
    }


NOISE_KEYS = tuple(_default_noise_scales())


@dataclass(frozen=True)
class SensitivityParams:
    stress_persistence: float = 0.6
    workload_to_stress: float = 0.8
    # lower bound on the workload index as it enters the stress update;
    # keeps days off a partial recovery rather than a reset to zero
    workload_floor: float = -0.5
    stress_to_sleep: float = 0.15
    stress_to_mood: float = 0.35
    sleep_to_mood: float = 0.4
    stress_overeat_gain: float = 0.04
    season_amplitude: float = 0.3
    noise_scales: dict[str, float] = field(default_factory=_default_noise_scales)

    def noise(self, name: str) -> float:
        return self.noise_scales[name]


@dataclass(frozen=True)
class InterventionTypeParams:
    annual_rate: float
    duration_range: tuple[int, int]
    intensity_range: tuple[float, float]
    effect_probability: float = 0.7


def _default_interventions() -> dict[str, InterventionTypeParams]:
    return {
        "vacation": InterventionTypeParams(1.5, (5, 14), (0.5, 1.0)),
        "sick_leave": InterventionTypeParams(2.0, (1, 5), (0.3, 0.9)),
        "workload_cap": InterventionTypeParams(0.3, (14, 60), (0.3, 0.8)),
        "lifestyle_program": InterventionTypeParams(0.4, (30, 90), (0.3, 0.9)),
    }


@dataclass(frozen=True)
class InterventionParams:
    vacation: InterventionTypeParams = field(default_factory=lambda: _default_interventions()["vacation"])
    sick_leave: InterventionTypeParams = field(default_factory=lambda: _default_interventions()["sick_leave"])
    workload_cap: InterventionTypeParams = field(default_factory=lambda: _default_interventions()["workload_cap"])
    lifestyle_program: InterventionTypeParams = field(
        default_factory=lambda: _default_interventions()["lifestyle_program"]
    )

    def of(self, kind: str) -> InterventionTypeParams:
        return getattr(self, kind)


def _default_profession_mix() -> dict[str, float]:
    return {p.name: 1.0 for p in PROFESSIONS}


def _default_work_mode_mix() -> dict[str, float]:
    return {"remote": 0.3, "onsite": 0.4, "hybrid": 0.3}


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 20240101
    population_size: int = 1000
    start_date: dt.date = dt.date(2024, 1, 1)
    end_date: dt.date = dt.date(2025, 12, 31)
    sensitivities: SensitivityParams = field(default_factory=SensitivityParams)
    intervention_params: InterventionParams = field(default_factory=InterventionParams)
    profession_mix: dict[str, float] = field(default_factory=_default_profession_mix)
    work_mode_mix: dict[str, float] = field(default_factory=_default_work_mode_mix)
    emit_denormalized: bool = True

    @property
    def n_days(self) -> int:
        return (self.end_date - self.start_date).days + 1

    def replace(self, **changes: Any) -> "GeneratorConfig":
        return dataclasses.replace(self, **changes)


def default_config() -> GeneratorConfig:
    """The reference configuration: 1,000 users over 2024-01-01..2025-12-31."""
    return GeneratorConfig()


def _finite(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_mix(name: str, mix: Mapping[str, float], allowed: tuple[str, ...]) -> list[str]:
    problems = []
    for key, w in mix.items():
        if key not in allowed:
            problems.append(f"{name}.{key}: unknown category (expected one of {', '.join(allowed)})")
        elif not _finite(w) or w < 0:
            problems.append(f"{name}.{key}: weight must be a finite nonnegative number")
    if not problems and sum(mix.values()) <= 0:
        problems.append(f"{name}: weights must sum to a positive value")
    return problems


def validate_config(config: GeneratorConfig) -> list[str]:
    """Return one message per violated invariant; empty when the config is usable."""
    problems: list[str] = []
    if not isinstance(config.seed, int) or isinstance(config.seed, bool) or not 0 <= config.seed <= MAX_SEED:
        problems.append("seed: must be an unsigned 64-bit integer")
    if not isinstance(config.population_size, int) or config.population_size < 1:
        problems.append("population_size: must be an integer >= 1")
    if config.start_date > config.end_date:
        problems.append(f"start_date: {config.start_date} is after end_date {config.end_date}")

    s = config.sensitivities
    for name in (
        "stress_persistence",
        "workload_to_stress",
        "stress_to_sleep",
        "stress_to_mood",
        "sleep_to_mood",
        "stress_overeat_gain",
        "season_amplitude",
    ):
        value = getattr(s, name)
        if not _finite(value) or value < 0:
            problems.append(f"sensitivities.{name}: must be finite and nonnegative")
    if _finite(s.stress_persistence) and s.stress_persistence >= 1:
        problems.append("sensitivities.stress_persistence: must be < 1")
    if not _finite(s.workload_floor):
        problems.append("sensitivities.workload_floor: must be finite")
    for key in NOISE_KEYS:
        if key not in s.noise_scales:
            problems.append(f"sensitivities.noise_scales.{key}: missing")
    for key, value in s.noise_scales.items():
        if key not in NOISE_KEYS:
            problems.append(f"sensitivities.noise_scales.{key}: unknown noise channel")
        elif not _finite(value) or value < 0:
            problems.append(f"sensitivities.noise_scales.{key}: must be finite and nonnegative")

    for kind in INTERVENTION_TYPES:
        p = config.intervention_params.of(kind)
        prefix = f"intervention_params.{kind}"
        if not _finite(p.annual_rate) or p.annual_rate < 0:
            problems.append(f"{prefix}.annual_rate: must be finite and nonnegative")
        lo, hi = p.duration_range
        if not (isinstance(lo, int) and isinstance(hi, int)) or lo < 1 or lo > hi:
            problems.append(f"{prefix}.duration_range: need integers 1 <= min <= max")
        lo, hi = p.intensity_range
        if not (_finite(lo) and _finite(hi)) or not 0 <= lo <= hi <= 1:
            problems.append(f"{prefix}.intensity_range: need 0 <= min <= max <= 1")
        if not _finite(p.effect_probability) or not 0 <= p.effect_probability <= 1:
            problems.append(f"{prefix}.effect_probability: must lie in [0, 1]")

    problems += _check_mix("profession_mix", config.profession_mix, tuple(p.name for p in PROFESSIONS))
    problems += _check_mix("work_mode_mix", config.work_mode_mix, WORK_MODES)
    if not isinstance(config.emit_denormalized, bool):
        problems.append("emit_denormalized: must be a boolean")
    return problems


# ---------------------------------------------------------------------------
# flat dotted-key (de)serialization
# ---------------------------------------------------------------------------


def serialize(config: GeneratorConfig) -> dict[str, Any]:
    """Flatten a config into a JSON-compatible dict with dotted keys."""
    flat: dict[str, Any] = {
        "seed": config.seed,
        "population_size": config.population_size,
        "start_date": config.start_date.isoformat(),
        "end_date": config.end_date.isoformat(),
        "emit_denormalized": config.emit_denormalized,
    }
    s = config.sensitivities
    for f in dataclasses.fields(s):
        if f.name == "noise_scales":
            for key in sorted(s.noise_scales):
                flat[f"sensitivities.noise_scales.{key}"] = s.noise_scales[key]
        else:
            flat[f"sensitivities.{f.name}"] = getattr(s, f.name)
    for kind in INTERVENTION_TYPES:
        p = config.intervention_params.of(kind)
        flat[f"intervention_params.{kind}.annual_rate"] = p.annual_rate
        flat[f"intervention_params.{kind}.duration_range"] = list(p.duration_range)
        flat[f"intervention_params.{kind}.intensity_range"] = list(p.intensity_range)
        flat[f"intervention_params.{kind}.effect_probability"] = p.effect_probability
    for key in sorted(config.profession_mix):
        flat[f"profession_mix.{key}"] = config.profession_mix[key]
    for key in sorted(config.work_mode_mix):
        flat[f"work_mode_mix.{key}"] = config.work_mode_mix[key]
    return flat


def config_digest(config: GeneratorConfig) -> str:
    blob = json.dumps(serialize(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _flatten(doc: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def _as_date(key: str, value: Any) -> dt.date:
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError(f"{key}: expected an ISO date (YYYY-MM-DD), got {value!r}", key) from None


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}", key)
    return value


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}", key)
    return float(value)


def _as_pair(key: str, value: Any, conv) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{key}: expected a [min, max] pair", key)
    return (conv(key, value[0]), conv(key, value[1]))


def apply_overrides(base: GeneratorConfig, doc: Mapping[str, Any]) -> GeneratorConfig:
    """Apply a (nested or dotted) mapping of overrides to ``base``; no validation."""
    flat = _flatten(doc)
    top: dict[str, Any] = {}
    sens = dataclasses.asdict(base.sensitivities)
    sens["noise_scales"] = dict(base.sensitivities.noise_scales)
    inter = {k: dataclasses.asdict(base.intervention_params.of(k)) for k in INTERVENTION_TYPES}
    professions = dict(base.profession_mix)
    modes = dict(base.work_mode_mix)
    professions_given: dict[str, float] = {}
    modes_given: dict[str, float] = {}

    for key, value in flat.items():
        parts = key.split(".")
        head = parts[0]
        if key == "seed" or key == "population_size":
            top[key] = _as_int(key, value)
        elif key in ("start_date", "end_date"):
            top[key] = _as_date(key, value)
        elif key == "emit_denormalized":
            if not isinstance(value, bool):
                raise ConfigError(f"{key}: expected true/false", key)
            top[key] = value
        elif head == "sensitivities" and len(parts) == 3 and parts[1] == "noise_scales":
            sens["noise_scales"][parts[2]] = _as_float(key, value)
        elif head == "sensitivities" and len(parts) == 2 and parts[1] in sens and parts[1] != "noise_scales":
            sens[parts[1]] = _as_float(key, value)
        elif head == "intervention_params" and len(parts) == 3 and parts[1] in inter:
            kind, attr = parts[1], parts[2]
            if attr == "annual_rate" or attr == "effect_probability":
                inter[kind][attr] = _as_float(key, value)
            elif attr == "duration_range":
                inter[kind][attr] = _as_pair(key, value, _as_int)
            elif attr == "intensity_range":
                inter[kind][attr] = _as_pair(key, value, _as_float)
            else:
                raise ConfigError(f"{key}: unknown configuration key", key)
        elif head == "profession_mix" and len(parts) == 2:
            professions_given[parts[1]] = _as_float(key, value)
        elif head == "work_mode_mix" and len(parts) == 2:
            modes_given[parts[1]] = _as_float(key, value)
        else:
            raise ConfigError(f"{key}: unknown configuration key", key)

    # a mix given in the file replaces the default mix wholesale
    if professions_given:
        professions = professions_given
    if modes_given:
        modes = modes_given
    return dataclasses.replace(
        base,
        **top,
        sensitivities=SensitivityParams(**sens),
        intervention_params=InterventionParams(
            **{
                k: InterventionTypeParams(
                    annual_rate=v["annual_rate"],
                    duration_range=tuple(v["duration_range"]),
                    intensity_range=tuple(v["intensity_range"]),
                    effect_probability=v["effect_probability"],
                )
                for k, v in inter.items()
            }
        ),
        profession_mix=professions,
        work_mode_mix=modes,
    )


def _raise_if_invalid(config: GeneratorConfig) -> GeneratorConfig:
    problems = validate_config(config)
    if problems:
        field_name = problems[0].split(":", 1)[0]
        raise ConfigError("invalid configuration: " + "; ".join(problems), field_name)
    return config


def parse_config(text: str, source: str = "<string>") -> GeneratorConfig:
    if not text.strip():
        return default_config()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: parse error at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: top level must be an object")
    return _raise_if_invalid(apply_overrides(default_config(), doc))


def load_config(path: str | os.PathLike) -> GeneratorConfig:
    """Read a JSON config file; keys left out keep their default values."""
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))


def dump_config(config: GeneratorConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(serialize(config), indent=2) + "\n", encoding="utf-8")


def resolve_config(
    path: str | os.PathLike | None = None,
    env: Mapping[str, str] | None = None,
    **overrides: Any,
) -> GeneratorConfig:
    """Combine defaults, a config file, ``FLOW_SEED`` and explicit overrides.

    Precedence is overrides > environment > file > defaults. Overrides whose
    value is ``None`` are ignored.
    """
    config = load_config(path) if path is not None else default_config()
    env = os.environ if env is None else env
    if env.get("FLOW_SEED"):
        try:
            config = config.replace(seed=int(env["FLOW_SEED"]))
        except ValueError:
            raise ConfigError(f"FLOW_SEED: not an integer: {env['FLOW_SEED']!r}", "seed") from None
    changes = {k: v for k, v in overrides.items() if v is not None}
    if changes:
        config = config.replace(**changes)
    return _raise_if_invalid(config)


__all__ = [
    "CHRONOTYPES",
    "ConfigError",
    "GeneratorConfig",
    "INTERVENTION_TYPES",
    "InterventionParams",
    "InterventionTypeParams",
    "SensitivityParams",
    "apply_overrides",
    "config_digest",
    "default_config",
    "dump_config",
    "load_config",
    "parse_config",
    "resolve_config",
    "serialize",
    "validate_config",
]
