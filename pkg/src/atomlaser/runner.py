"""Scenario pipelines behind the command-line interface."""
from __future__ import annotations

import dataclasses
import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy
import yaml

from . import __version__
from .artifacts import write_csv, write_json
from .coherence import intensity_noise_spectrum, power_spectrum
from .config import ScenarioConfig
from .criteria import evaluate_criteria
from .dynamics import correlation_g1, correlation_g2, fit_linewidth, steady_state, tau_grid
from .errors import ConfigInvalid, TruncationTooSmall
from .kinematics import derive_beam_scales
from .models import (ModelParams, generic_laser, ideal_laser, linear_amplifier,
                     sg_laser, three_mode_laser)
from .operators import TOLERANCES
from .semiclassical import model_prediction, predict_threshold, simulate_phase_diffusion

log = logging.getLogger(__name__)

SINGLE_MODE = {"ideal": ideal_laser, "sg": sg_laser, "linear_amp": linear_amplifier,
               "generic": generic_laser}


def build_model(cfg: ScenarioConfig):
    if cfg.model in SINGLE_MODE:
        if cfg.dims[0] > cfg.dim_cap:
            raise ConfigInvalid(f"dims.a={cfg.dims[0]} exceeds dim_cap={cfg.dim_cap}")
        return SINGLE_MODE[cfg.model](cfg.params, cfg.dims[0])
    return three_mode_laser(cfg.params, cfg.dims, cfg.dim_cap)


def _tail_masses(rho):
    return {name: float(rho.marginal_populations(i)[-1])
            for i, name in enumerate("abc"[: len(rho.dims)])}


def _check_tail(rho, tol):
    tails = _tail_masses(rho)
    worst = max(tails.values())
    if worst > tol:
        raise TruncationTooSmall(f"top-level population {worst:.2e} exceeds {tol:.1e}; enlarge dims")
    return tails


class Computation:
    """Lazily computes and caches the quantities a scenario asks for."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.L = build_model(cfg)
        self.rho = steady_state(self.L)
        self.tails = _check_tail(self.rho, cfg.tail_tolerance)
        tg = cfg.tau_grid
        self.tau = tau_grid(tg["max"], tg["points"], tg["spacing"])
        og = cfg.omega_grid
        self.omega = np.linspace(-og["max"], og["max"], og["points"])
        self._g1 = self._g2 = None

    @property
    def g1(self):
        if self._g1 is None:
            self._g1 = correlation_g1(self.L, tau=self.tau, rho_ss=self.rho)
        return self._g1

    @property
    def g2(self):
        if self._g2 is None:
            self._g2 = correlation_g2(self.L, tau=self.tau, rho_ss=self.rho)
        return self._g2

    def criteria(self):
        beam = derive_beam_scales(self.cfg.beam)
        return evaluate_criteria(beam, self.g2, self.g1, thresholds=self.cfg.thresholds,
                                 directional=self.cfg.directional,
                                 transverse_modes=self.cfg.transverse_modes)

    def prediction(self):
        return model_prediction(self.cfg.model, self.cfg.params)

    def phase_ensemble(self):
        gamma = self.prediction().Gamma
        if not (gamma > 0 and math.isfinite(gamma)):
            raise ConfigInvalid("phase output needs a finite predicted linewidth")
        dt = self.cfg.phase["dt_fraction"] / gamma
        n_traj = self.cfg.phase["n_traj"]
        steps = int(round(self.cfg.tau_grid["max"] / dt))
        if n_traj * steps > 50_000_000:
            raise ConfigInvalid(f"phase ensemble of {n_traj} x {steps} steps is too large")
        return simulate_phase_diffusion(gamma, dt, self.cfg.tau_grid["max"], n_traj, self.cfg.seed)


def _write_outputs(comp: Computation, out: Path) -> list:
    cfg = comp.cfg
    written = []
    for name in cfg.outputs:
        if name == "steady":
            p = comp.rho.marginal_populations(0)
            written.append(write_csv(out / "steady.csv", {"n": np.arange(len(p)), "p": p}))
        elif name == "g1":
            g = comp.g1
            written.append(write_csv(out / "g1.csv", {"tau": g.tau, "re": g.values.real,
                                                      "im": g.values.imag, "abs": g.magnitude()}))
        elif name == "g2":
            written.append(write_csv(out / "g2.csv", {"tau": comp.g2.tau, "g2": comp.g2.values}))
        elif name == "power":
            s = power_spectrum(comp.g1, omega=comp.omega)
            written.append(write_csv(out / "power.csv", {"omega": s.omega, "P": s.values}))
        elif name == "noise":
            s = intensity_noise_spectrum(comp.g2, omega=comp.omega)
            written.append(write_csv(out / "noise.csv", {"omega": s.omega, "S": s.values}))
        elif name == "criteria":
            written.append(write_json(out / "criteria.json", comp.criteria().to_dict()))
        elif name == "prediction":
            doc = dataclasses.asdict(comp.prediction())
            fit = fit_linewidth(comp.g1)
            doc["numeric"] = {"mean_n": comp.g1.mean_n, "Gamma_fit": fit.gamma,
                              "Gamma_fit_truncated": fit.truncated}
            written.append(write_json(out / "prediction.json", doc))
        elif name == "phase":
            ens = comp.phase_ensemble()
            mean, err = ens.coherence()
            stride = max(1, len(ens.times) // 1000)
            written.append(write_csv(out / "phase.csv", {
                "tau": ens.times[::stride], "re": mean.real[::stride], "im": mean.imag[::stride],
                "stderr": err[::stride], "predicted": np.exp(-0.5 * ens.Gamma * ens.times[::stride])}))
    return written


def manifest(cfg: ScenarioConfig, status: str, wall: float, artifacts=(), tails=None,
             error=None) -> dict:
    doc = {
        "status": status,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.source if cfg is not None else None,
        "versions": {"atomlaser": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__, "pyyaml": yaml.__version__},
        "wall_time_s": wall,
        "artifacts": [Path(a).name for a in artifacts],
    }
    if cfg is not None:
        doc["params"] = cfg.params.as_dict()
        doc["dims"] = list(cfg.dims)
        doc["seed"] = cfg.seed
        doc["tolerances"] = {**dataclasses.asdict(TOLERANCES), "tail": cfg.tail_tolerance}
    if tails is not None:
        doc["tail_masses"] = tails
    if error is not None:
        doc["error"] = error
    return doc


def run_scenario(cfg: ScenarioConfig, out_dir) -> list:
    """Compute the requested outputs into ``out_dir`` and write manifest.json.

    Returns the artifact paths.  Errors propagate; the caller records them.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if not cfg.outputs:
        write_json(out / "manifest.json", manifest(cfg, "ok", time.perf_counter() - t0))
        return []
    comp = Computation(cfg)
    written = _write_outputs(comp, out)
    write_json(out / "manifest.json",
               manifest(cfg, "ok", time.perf_counter() - t0, written, comp.tails))
    return written


def criteria_for(cfg: ScenarioConfig):
    if cfg.beam is None:
        raise ConfigInvalid("criteria needs a beam section")
    return Computation(cfg).criteria()


# -- threshold sweep ------------------------------------------------------------

SWEEP_COLUMNS = ("theta", "regime", "confidence", "dim", "tail", "n_numeric", "n_predicted",
                 "var_numeric", "var_predicted", "g2_zero_numeric", "g2_zero_predicted",
                 "gamma_fit", "gamma_predicted")


def _sweep_point(args):
    theta, kappa, n_s, dim0, dim_cap, tail_tol, tau_max, points = args
    p = ModelParams(kappa=kappa, n_s=n_s, theta=theta)
    pred = predict_threshold(n_s, theta, kappa)
    dim = dim0
    while True:
        L = generic_laser(p, dim)
        rho = steady_state(L)
        tail = float(rho.populations[-1])
        if tail <= tail_tol:
            break
        if dim >= dim_cap:
            raise TruncationTooSmall(f"theta={theta}: tail {tail:.2e} at dim cap {dim_cap}")
        dim = min(2 * dim, dim_cap)
    n = np.arange(dim)
    pops = rho.populations
    mean = float(n @ pops)
    var = float((n * n) @ pops - mean ** 2)
    g2_zero = float((n * (n - 1)) @ pops / mean ** 2)
    # widen the window until |g1| has decayed past two decay constants
    while True:
        g1 = correlation_g1(L, tau=np.linspace(0.0, tau_max, points), rho_ss=rho)
        fit = fit_linewidth(g1)
        if not fit.truncated or tau_max > 1e6 / kappa:
            break
        tau_max *= 4
    return {"theta": theta, "regime": pred.regime, "confidence": pred.confidence, "dim": dim,
            "tail": tail, "n_numeric": mean, "n_predicted": pred.mean_n, "var_numeric": var,
            "var_predicted": pred.var_n, "g2_zero_numeric": g2_zero,
            "g2_zero_predicted": pred.g2_zero, "gamma_fit": fit.gamma,
            "gamma_predicted": pred.Gamma}


def sweep_threshold(cfg: ScenarioConfig, thetas, out_dir, workers: int | None = None) -> Path:
    """Steady statistics and linewidth of the generic laser across theta, one CSV row each.

    n_s is held at the configured value; dims.a is doubled per point until the
    top-level population is below tail_tolerance.
    """
    if cfg.model != "generic":
        raise ConfigInvalid("sweep needs model: generic")
    if cfg.params.n_s is None:
        raise ConfigInvalid("sweep needs params.n_s")
    thetas = [float(t) for t in thetas]
    if not thetas or min(thetas) <= 0:
        raise ConfigInvalid("theta values must be positive")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    p = cfg.params
    jobs = [(t, p.kappa, p.n_s, cfg.dims[0], cfg.dim_cap, cfg.tail_tolerance,
             cfg.tau_grid["max"], cfg.tau_grid["points"]) for t in thetas]
    workers = cfg.workers if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    path = write_csv(out / "sweep.csv", {c: [r[c] for r in rows] for c in SWEEP_COLUMNS})
    tails = {repr(r["theta"]): r["tail"] for r in rows}
    write_json(out / "manifest.json",
               manifest(cfg, "ok", time.perf_counter() - t0, [path], tails))
    return path
