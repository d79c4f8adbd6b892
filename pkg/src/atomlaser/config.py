"""Scenario files: YAML, validated against a per-model schema.

The schema is documented in docs/config.md for the full schema and configs/ for one example per model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .criteria import Thresholds
from .errors import ConfigInvalid
from .kinematics import BeamDescriptor
from .models import DEFAULT_DIM_CAP, ModelParams

MODELS = ("ideal", "sg", "linear_amp", "generic", "three_mode")
OUTPUTS = ("steady", "g1", "g2", "power", "noise", "criteria", "prediction", "phase")

TOP_KEYS = {"model", "params", "dims", "tau_grid", "omega_grid", "thresholds", "beam",
            "directional", "transverse_modes", "outputs", "seed", "workers", "dim_cap",
            "tail_tolerance", "phase"}
PARAM_KEYS = {"kappa", "mu", "nu", "n_s", "theta", "gamma", "N", "g", "lambda", "eta",
              "Omega", "epsilon"}
# kappa is optional everywhere: it defaults to 1 and so sets the time unit
REQUIRED_PARAMS = {
    "ideal": ("mu",),
    "sg": ("mu",),
    "linear_amp": ("mu",),
    "generic": (),
    "three_mode": ("g", "lambda", "gamma", "N"),
}
MODE_NAMES = {"three_mode": ("a", "b", "c")}
TAU_KEYS = {"max", "points", "spacing"}
OMEGA_KEYS = {"max", "points"}
THRESHOLD_KEYS = {"eps2", "eps3", "m4", "include_zero"}
BEAM_KEYS = {"species", "k_bar", "delta_k", "mass", "hbar", "c"}
PHASE_KEYS = {"n_traj", "dt_fraction"}


@dataclass
class ScenarioConfig:
    model: str
    params: ModelParams
    dims: tuple
    tau_grid: dict = field(default_factory=lambda: {"max": 100.0, "points": 401, "spacing": "linear"})
    omega_grid: dict = field(default_factory=lambda: {"max": 1.0, "points": 401})
    thresholds: Thresholds = Thresholds()
    beam: BeamDescriptor | None = None
    directional: bool | None = True
    transverse_modes: int | None = 1
    outputs: tuple = ()
    seed: int = 0
    workers: int = 1
    dim_cap: int = DEFAULT_DIM_CAP
    tail_tolerance: float = 1e-6
    phase: dict = field(default_factory=lambda: {"n_traj": 2000, "dt_fraction": 0.01})
    source: dict = field(default_factory=dict, repr=False)


def _keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigInvalid(f"{where} must be a mapping")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigInvalid(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    return section


def _num(value, where, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalid(f"{where} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigInvalid(f"{where} must be an integer")
    return int(value) if integer else float(value)


def parse_config(raw: dict) -> ScenarioConfig:
    _keys(raw, TOP_KEYS, "config")
    model = raw.get("model")
    if model not in MODELS:
        raise ConfigInvalid(f"model must be one of {MODELS}, got {model!r}")

    params = {k: _num(v, f"params.{k}") for k, v in _keys(raw.get("params", {}), PARAM_KEYS, "params").items()}
    missing = [k for k in REQUIRED_PARAMS[model] if k not in params]
    if model == "generic" and sum(k in params for k in ("nu", "n_s", "theta")) < 2:
        missing.append("two of nu/n_s/theta")
    if missing:
        raise ConfigInvalid(f"model {model} is missing params: {', '.join(missing)}")
    if "lambda" in params:
        params["lam"] = params.pop("lambda")
    try:
        mp = ModelParams(**params)
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc

    names = MODE_NAMES.get(model, ("a",))
    dims_raw = _keys(raw.get("dims", {}), set(names), "dims")
    if set(dims_raw) != set(names):
        raise ConfigInvalid(f"dims must give {', '.join(names)}")
    dims = tuple(_num(dims_raw[n], f"dims.{n}", integer=True) for n in names)
    if min(dims) < 2:
        raise ConfigInvalid("every dimension must be >= 2")

    cfg = ScenarioConfig(model=model, params=mp, dims=dims, source=raw)
    if "tau_grid" in raw:
        tg = {**cfg.tau_grid, **_keys(raw["tau_grid"], TAU_KEYS, "tau_grid")}
        if tg["spacing"] not in ("linear", "log"):
            raise ConfigInvalid("tau_grid.spacing must be linear or log")
        tg["max"] = _num(tg["max"], "tau_grid.max")
        tg["points"] = _num(tg["points"], "tau_grid.points", integer=True)
        cfg.tau_grid = tg
    if "omega_grid" in raw:
        og = {**cfg.omega_grid, **_keys(raw["omega_grid"], OMEGA_KEYS, "omega_grid")}
        cfg.omega_grid = {"max": _num(og["max"], "omega_grid.max"),
                          "points": _num(og["points"], "omega_grid.points", integer=True)}
    if "thresholds" in raw:
        th = _keys(raw["thresholds"], THRESHOLD_KEYS, "thresholds")
        cfg.thresholds = Thresholds(**{k: (bool(v) if k == "include_zero" else _num(v, f"thresholds.{k}"))
                                       for k, v in th.items()})
    if "beam" in raw:
        b = dict(_keys(raw["beam"], BEAM_KEYS, "beam"))
        if b.get("species") not in ("photon", "massive"):
            raise ConfigInvalid("beam.species must be photon or massive")
        for k in ("k_bar", "delta_k"):
            if k not in b:
                raise ConfigInvalid(f"beam.{k} is required")
        cfg.beam = BeamDescriptor(**{k: (v if k == "species" else _num(v, f"beam.{k}")) for k, v in b.items()})
    if "phase" in raw:
        ph = {**cfg.phase, **_keys(raw["phase"], PHASE_KEYS, "phase")}
        cfg.phase = {"n_traj": _num(ph["n_traj"], "phase.n_traj", integer=True),
                     "dt_fraction": _num(ph["dt_fraction"], "phase.dt_fraction")}
    outputs = raw.get("outputs", [])
    if not isinstance(outputs, list) or any(o not in OUTPUTS for o in outputs):
        raise ConfigInvalid(f"outputs must be a list drawn from {OUTPUTS}")
    cfg.outputs = tuple(outputs)
    if "criteria" in cfg.outputs and cfg.beam is None:
        raise ConfigInvalid("criteria output needs a beam section")
    for key in ("seed", "workers", "dim_cap"):
        if key in raw:
            setattr(cfg, key, _num(raw[key], key, integer=True))
    if "tail_tolerance" in raw:
        cfg.tail_tolerance = _num(raw["tail_tolerance"], "tail_tolerance")
    if "directional" in raw:
        if raw["directional"] is not None and not isinstance(raw["directional"], bool):
            raise ConfigInvalid("directional must be true, false or null")
        cfg.directional = raw["directional"]
    if "transverse_modes" in raw:
        tm = raw["transverse_modes"]
        cfg.transverse_modes = None if tm is None else _num(tm, "transverse_modes", integer=True)
    return cfg


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")   # OSError propagates (exit 5)
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigInvalid(f"{path} does not contain a mapping")
    return parse_config(raw)
