"""Run configuration files and named presets.

A run file is YAML with three sections; every physical quantity carries its
unit in the key name::

    model: driven_dot            # or dot_cavity
    physics:
      field_strength_per_ps: 1.0 # or envelope: {area_rad, fwhm_ps, center_ps}
      detuning_mev: 0.0
      radiative_rate_per_ps: 0.05
      temperature_k: 100.0
      phonons: true
    numerics:
      dt_ps: 0.5
      duration_ps: 50.0
      n_c: 7
    initial_state: ground        # ground | exciton | photon | state index

Dot-cavity runs use ``coupling_mev`` and ``cavity_loss_per_ps`` instead of
the field and radiative rate. An optional ``sweep`` section holds a default
``parameter`` and ``values`` for the ``sweep`` command.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .adm import DEFAULT_MEMORY_BUDGET, SPLITTINGS, TRACE_POLICIES, SimulationConfig, SystemModel
from .errors import ValidationError
from .liouville import HBAR, DensityMatrix
from .models import (CAV_G, CAV_P, CAV_X, EXCITON, GROUND, DotCavityModel, DrivenDotModel,
                     build_dot_cavity, build_driven_dot, gaussian_envelope)

MODELS = ("driven_dot", "dot_cavity")

PHYSICS_KEYS = {
    "driven_dot": {"field_strength_per_ps", "envelope", "detuning_mev", "radiative_rate_per_ps",
                   "temperature_k", "phonons"},
    "dot_cavity": {"coupling_mev", "detuning_mev", "cavity_loss_per_ps", "temperature_k", "phonons"},
}
NUMERICS_KEYS = {"dt_ps", "duration_ps", "n_c", "trace_policy", "splitting", "memory_budget_mib",
                 "t0_ps"}
TOP_KEYS = {"model", "physics", "numerics", "initial_state", "preset", "notes", "sweep"}
ENVELOPE_KEYS = {"area_rad", "fwhm_ps", "center_ps"}

#: ``sweep`` parameter name -> physics key, per model
SWEEP_PARAMETERS = {
    "driven_dot": {"field_strength": "field_strength_per_ps", "detuning": "detuning_mev",
                   "temperature": "temperature_k", "rate": "radiative_rate_per_ps"},
    "dot_cavity": {"detuning": "detuning_mev", "temperature": "temperature_k",
                   "rate": "cavity_loss_per_ps", "coupling": "coupling_mev"},
}

STATE_NAMES = {
    "driven_dot": {"ground": GROUND, "exciton": EXCITON},
    "dot_cavity": {"ground": CAV_G, "photon": CAV_P, "exciton": CAV_X},
}

DEFAULT_PHYSICS = {
    "driven_dot": {"field_strength_per_ps": 1.0, "detuning_mev": 0.0, "radiative_rate_per_ps": 0.0,
                   "temperature_k": 0.0, "phonons": True},
    "dot_cavity": {"coupling_mev": 0.05, "detuning_mev": 0.0, "cavity_loss_per_ps": 0.0,
                   "temperature_k": 0.0, "phonons": True},
}
DEFAULT_NUMERICS = {"dt_ps": 0.5, "duration_ps": 50.0, "n_c": 7, "trace_policy": "monitor_only",
                    "splitting": "lie", "memory_budget_mib": DEFAULT_MEMORY_BUDGET // 2**20,
                    "t0_ps": 0.0}

_COUPLING_ESTIMATE = ("coupling_mev = 0.05 is an estimate: the reference scenario does not state "
                      "the light-matter coupling")

PRESETS = {
    "fig1a": {
        "description": "resonant constant drive, radiative decay, no phonons (0-50 ps)",
        "model": "driven_dot",
        "physics": {"field_strength_per_ps": 1.0, "detuning_mev": 0.0,
                    "radiative_rate_per_ps": 0.05, "phonons": False},
        "numerics": {"dt_ps": 0.01, "duration_ps": 50.0, "n_c": 1},
        "initial_state": "ground",
        "sweep": {"parameter": "rate", "values": [0.0, 0.05, 0.1]},
    },
    "fig1b": {
        "description": "resonant constant drive with LA phonons at 100 K, no radiative decay",
        "model": "driven_dot",
        "physics": {"field_strength_per_ps": 1.0, "detuning_mev": 0.0,
                    "radiative_rate_per_ps": 0.0, "temperature_k": 100.0},
        "numerics": {"dt_ps": 0.5, "duration_ps": 50.0, "n_c": 7},
        "initial_state": "ground",
    },
    "fig1d": {
        "description": "off-resonant drive (+1 meV) with phonons at 100 K and radiative decay",
        "model": "driven_dot",
        "physics": {"field_strength_per_ps": 1.0, "detuning_mev": 1.0,
                    "radiative_rate_per_ps": 0.05, "temperature_k": 100.0},
        "numerics": {"dt_ps": 0.5, "duration_ps": 150.0, "n_c": 7},
        "initial_state": "ground",
        "sweep": {"parameter": "rate", "values": [0.0, 0.05, 0.1]},
    },
    "fig2c": {
        "description": "stationary occupation vs field strength at +1 meV, 1 K, with decay",
        "model": "driven_dot",
        "physics": {"field_strength_per_ps": 2.0, "detuning_mev": 1.0,
                    "radiative_rate_per_ps": 0.05, "temperature_k": 1.0},
        "numerics": {"dt_ps": 0.5, "duration_ps": 200.0, "n_c": 10},
        "initial_state": "ground",
        "sweep": {"parameter": "field_strength", "values": [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0]},
    },
    "fig4-T1K": {
        "description": "dot-cavity decay from |X> at 1 K, cavity loss 0.1 / ps, +1 meV detuning",
        "model": "dot_cavity",
        "physics": {"coupling_mev": 0.05, "detuning_mev": 1.0, "cavity_loss_per_ps": 0.1,
                    "temperature_k": 1.0},
        "numerics": {"dt_ps": 0.5, "duration_ps": 200.0, "n_c": 10},
        "initial_state": "exciton",
        "notes": [_COUPLING_ESTIMATE],
        "sweep": {"parameter": "detuning", "values": [-1.0, 0.0, 1.0]},
    },
    "fig4-T100K": {
        "description": "dot-cavity decay from |X> at 100 K, cavity loss 0.1 / ps, +1 meV detuning",
        "model": "dot_cavity",
        "physics": {"coupling_mev": 0.05, "detuning_mev": 1.0, "cavity_loss_per_ps": 0.1,
                    "temperature_k": 100.0},
        "numerics": {"dt_ps": 0.5, "duration_ps": 200.0, "n_c": 7},
        "initial_state": "exciton",
        "notes": [_COUPLING_ESTIMATE],
        "sweep": {"parameter": "detuning", "values": [-1.0, 0.0, 1.0]},
    },
}


def _number(where, value, minimum=None, strict=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if minimum is not None and (value < minimum or (strict and value == minimum)):
        op = ">" if strict else ">="
        raise ValidationError(f"{where}: must be {op} {minimum}, got {value}")
    return value


def _check_keys(where, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ValidationError(f"{where}: expected a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ValidationError(f"{where}: unknown key(s) {', '.join(unknown)}; allowed: "
                              f"{', '.join(sorted(allowed))}")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description; ``as_dict()`` is the canonical form written to meta.json."""

    model: str
    physics: dict
    numerics: dict
    initial_state: int
    preset: str | None = None
    notes: tuple = ()
    sweep: dict | None = field(default=None, compare=False)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        _check_keys("config", raw, TOP_KEYS)
        model = raw.get("model")
        if model not in MODELS:
            raise ValidationError(f"model: must be one of {', '.join(MODELS)}, got {model!r}")
        physics = dict(DEFAULT_PHYSICS[model])
        raw_physics = raw.get("physics") or {}
        _check_keys("physics", raw_physics, PHYSICS_KEYS[model])
        physics.update(raw_physics)
        numerics = dict(DEFAULT_NUMERICS)
        raw_numerics = raw.get("numerics") or {}
        _check_keys("numerics", raw_numerics, NUMERICS_KEYS)
        numerics.update(raw_numerics)

        for key in ("detuning_mev",):
            physics[key] = _number(f"physics.{key}", physics[key])
        for key in ("temperature_k", "radiative_rate_per_ps", "cavity_loss_per_ps", "coupling_mev",
                    "field_strength_per_ps"):
            if key in physics:
                physics[key] = _number(f"physics.{key}", physics[key], 0.0)
        if not isinstance(physics["phonons"], bool):
            raise ValidationError(f"physics.phonons: expected true/false, got {physics['phonons']!r}")
        if "envelope" in physics:
            env = physics["envelope"]
            _check_keys("physics.envelope", env, ENVELOPE_KEYS)
            missing = ENVELOPE_KEYS - set(env)
            if missing:
                raise ValidationError(f"physics.envelope: missing {', '.join(sorted(missing))}")
            physics["envelope"] = {"area_rad": _number("physics.envelope.area_rad", env["area_rad"]),
                                   "fwhm_ps": _number("physics.envelope.fwhm_ps", env["fwhm_ps"], 0.0, True),
                                   "center_ps": _number("physics.envelope.center_ps", env["center_ps"])}
            if "field_strength_per_ps" in raw_physics:
                raise ValidationError("physics: give either field_strength_per_ps or envelope, not both")
            physics.pop("field_strength_per_ps", None)

        numerics["dt_ps"] = _number("numerics.dt_ps", numerics["dt_ps"], 0.0, True)
        numerics["duration_ps"] = _number("numerics.duration_ps", numerics["duration_ps"], 0.0)
        numerics["t0_ps"] = _number("numerics.t0_ps", numerics["t0_ps"])
        numerics["memory_budget_mib"] = _number("numerics.memory_budget_mib",
                                                numerics["memory_budget_mib"], 0.0, True)
        n_c = numerics["n_c"]
        if isinstance(n_c, bool) or not isinstance(n_c, int) or n_c < 1:
            raise ValidationError(f"numerics.n_c: expected a positive integer, got {n_c!r}")
        steps = numerics["duration_ps"] / numerics["dt_ps"]
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValidationError(f"numerics.duration_ps: {numerics['duration_ps']} is not a multiple "
                                  f"of dt_ps = {numerics['dt_ps']}")
        if numerics["trace_policy"] not in TRACE_POLICIES:
            raise ValidationError(f"numerics.trace_policy: must be one of {', '.join(TRACE_POLICIES)}")
        if numerics["splitting"] not in SPLITTINGS:
            raise ValidationError(f"numerics.splitting: must be one of {', '.join(SPLITTINGS)}")

        state = raw.get("initial_state", "ground")
        names = STATE_NAMES[model]
        if isinstance(state, str):
            if state not in names:
                raise ValidationError(f"initial_state: must be one of {', '.join(names)} or an index")
            state = names[state]
        elif isinstance(state, bool) or not isinstance(state, int) or not 0 <= state < len(names):
            raise ValidationError(f"initial_state: invalid state {state!r}")

        notes = raw.get("notes") or ()
        if isinstance(notes, str):
            notes = (notes,)
        sweep = raw.get("sweep")
        if sweep is not None:
            _check_keys("sweep", sweep, {"parameter", "values"})
        return cls(model, physics, numerics, int(state), raw.get("preset"), tuple(notes), sweep)

    @property
    def n_steps(self):
        return int(round(self.numerics["duration_ps"] / self.numerics["dt_ps"]))

    @property
    def observed_state(self):
        """Index of the exciton state, the default observable."""
        return EXCITON if self.model == "driven_dot" else CAV_X

    def as_dict(self):
        out = {"model": self.model, "physics": copy.deepcopy(self.physics),
               "numerics": dict(self.numerics), "initial_state": self.initial_state}
        if self.preset:
            out["preset"] = self.preset
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def with_value(self, parameter, value) -> "RunConfig":
        """Copy with one sweep parameter replaced."""
        keys = SWEEP_PARAMETERS[self.model]
        if parameter not in keys:
            raise ValidationError(f"sweep parameter must be one of {', '.join(keys)} for "
                                  f"{self.model}, got {parameter!r}")
        raw = self.as_dict()
        raw["physics"][keys[parameter]] = value
        if parameter == "field_strength":
            raw["physics"].pop("envelope", None)
        return RunConfig.from_dict(raw)

    def with_numerics(self, **changes) -> "RunConfig":
        raw = self.as_dict()
        raw["numerics"].update(changes)
        return RunConfig.from_dict(raw)

    def build(self) -> tuple[SystemModel, SimulationConfig]:
        p, n = self.physics, self.numerics
        if self.model == "driven_dot":
            if "envelope" in p:
                env = p["envelope"]
                f = gaussian_envelope(env["area_rad"], env["fwhm_ps"], env["center_ps"])
            else:
                f = p["field_strength_per_ps"]
            model = build_driven_dot(DrivenDotModel(f, p["detuning_mev"], p["radiative_rate_per_ps"],
                                                    p["temperature_k"], p["phonons"]))
        else:
            model = build_dot_cavity(DotCavityModel(p["coupling_mev"] / HBAR, p["detuning_mev"],
                                                    p["cavity_loss_per_ps"], p["temperature_k"],
                                                    p["phonons"]))
        dim = model.hamiltonian.dim
        sim = SimulationConfig(n["dt_ps"], self.n_steps, n["n_c"],
                               DensityMatrix.pure(dim, self.initial_state),
                               trace_policy=n["trace_policy"], t0=n["t0_ps"],
                               memory_budget=int(n["memory_budget_mib"] * 2**20),
                               splitting=n["splitting"])
        return model, sim


def preset(name) -> RunConfig:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    raw = {k: copy.deepcopy(v) for k, v in PRESETS[name].items() if k != "description"}
    raw["preset"] = name
    return RunConfig.from_dict(raw)


def load_config(path) -> RunConfig:
    """Parse and validate a YAML run file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config {path}: top level must be a mapping")
    if "preset" in raw and set(raw) <= {"preset"}:
        return preset(raw["preset"])
    return RunConfig.from_dict(raw)


def dump_config(cfg: RunConfig) -> str:
    raw = cfg.as_dict()
    if cfg.sweep:
        raw["sweep"] = cfg.sweep
    return yaml.safe_dump(raw, sort_keys=False)
