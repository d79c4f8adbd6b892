"""Analytic threshold predictions and a stochastic phase-diffusion model.

These are independent of the master-equation pipeline and serve as its
cross-check.  The phase SDE ignores intensity diffusion entirely: the number
variable is frozen at its stationary value and only the phase random-walks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepTooCoarse

ABOVE, BELOW, TRANSITION = "above", "below", "transition"


@dataclass(frozen=True)
class ThresholdPrediction:
    regime: str
    mean_n: float
    var_n: float
    Gamma: float               # phase-diffusion linewidth
    g2_zero: float
    flux_over_linewidth: float
    confidence: str = "high"   # "low" inside the transition region


def classify_regime(theta: float, n_s: float, multiplier: float = 5.0) -> str:
    """Above if theta - 1 >= m / sqrt(n_s), below if 1 - theta >= m / n_s."""
    if multiplier <= 0:
        raise ValueError("multiplier must be positive")
    if theta - 1 >= multiplier / math.sqrt(n_s):
        return ABOVE
    if 1 - theta >= multiplier / n_s:
        return BELOW
    return TRANSITION


def _above(theta, n_s, kappa):
    n = n_s * (theta - 1)
    gamma = kappa / (2 * n) if n > 0 else math.inf
    g2 = 1 + 1 / (n_s * (theta - 1) ** 2) if theta != 1 else math.inf
    return n, n_s * theta, gamma, g2, 2 * n * n


def _below(theta, n_s, kappa):
    n = theta / (1 - theta)
    gamma = kappa * (1 - theta)
    return n, n * (n + 1), gamma, 2.0, theta / (1 - theta) ** 2


def predict_threshold(n_s: float, theta: float, kappa: float = 1.0,
                      multiplier: float = 5.0) -> ThresholdPrediction:
    """Leading-order statistics of the saturable-gain laser on either side of threshold.

    Above threshold: <n> = n_s(theta-1), Var n = n_s theta, Gamma = kappa/(2<n>),
    g2(0) = 1 + 1/(n_s (theta-1)^2), flux/Gamma = 2<n>^2.
    Below threshold: <n> = theta/(1-theta) (thermal), Gamma = kappa(1-theta).
    In the transition region the formulas of the side theta lies on are
    returned with ``confidence="low"``; exactly at theta = 1 they are NaN.
    """
    if not (n_s > 1 and theta > 0):
        raise ValueError("need n_s > 1 and theta > 0")
    regime = classify_regime(theta, n_s, multiplier)
    if regime == TRANSITION and theta == 1:
        nan = math.nan
        return ThresholdPrediction(regime, nan, nan, nan, nan, nan, "low")
    side = _above if (regime == ABOVE or (regime == TRANSITION and theta > 1)) else _below
    n, var, gamma, g2, ratio = side(theta, n_s, kappa)
    return ThresholdPrediction(regime, n, var, gamma, g2, ratio,
                               "low" if regime == TRANSITION else "high")


@dataclass(frozen=True)
class PhaseTrajectoryEnsemble:
    seed: int
    dt: float
    Gamma: float
    times: np.ndarray
    phases: np.ndarray    # shape (n_traj, len(times))

    @property
    def n_traj(self) -> int:
        return self.phases.shape[0]

    def coherence(self):
        """Ensemble <exp(-i [phi(t) - phi(0)])> and its standard error (real part)."""
        z = np.exp(-1j * (self.phases - self.phases[:, :1]))
        mean = z.mean(axis=0)
        err = z.real.std(axis=0, ddof=1) / math.sqrt(self.n_traj)
        return mean, err

    def increment_variance(self, lag_steps: int):
        """<[phi(lag) - phi(0)]^2> over trajectories, with its standard error."""
        sq = self.phases[:, lag_steps] ** 2
        return float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(len(sq)))


def simulate_phase_diffusion(Gamma: float, dt: float, T: float, n_traj: int,
                             seed: int = 0) -> PhaseTrajectoryEnsemble:
    """Euler-Maruyama for d phi = sqrt(Gamma) dW, phi(0) = 0.

    Each step adds a normal increment of variance Gamma*dt.  The generator is
    numpy's PCG64 seeded from ``seed``, so ensembles are reproducible.
    """
    if Gamma < 0:
        raise ValueError("Gamma must be non-negative")
    if Gamma > 0 and Gamma * dt > 0.01 * (1 + 1e-12):
        raise StepTooCoarse(f"dt={dt} exceeds 0.01/Gamma={0.01 / Gamma}")
    steps = int(round(T / dt))
    rng = np.random.default_rng(seed)
    incr = rng.standard_normal((n_traj, steps)) * math.sqrt(Gamma * dt)
    phases = np.concatenate([np.zeros((n_traj, 1)), np.cumsum(incr, axis=1)], axis=1)
    return PhaseTrajectoryEnsemble(seed, dt, Gamma, dt * np.arange(steps + 1), phases)


def model_prediction(model: str, params) -> ThresholdPrediction:
    """Closed-form statistics for each model family, for side-by-side reporting.

    ``params`` is a ModelParams.  The three-mode model is mapped onto the
    saturable-gain laser through its eliminated rates.
    """
    k = params.kappa
    if model in ("ideal", "sg", "linear_amp"):
        mu = params.mu
        if model == "linear_amp":
            return ThresholdPrediction("amplifier", mu, mu * (mu + 1), k / (mu + 1), 2.0, mu * (mu + 1))
        gamma = k / (2 * mu) if model == "ideal" else k / (4 * mu)
        return ThresholdPrediction(ABOVE, mu, mu, gamma, 1.0, k * mu / gamma)
    if model == "three_mode":
        from .models import eliminated_rates

        r = eliminated_rates(params)
        return predict_threshold(r["n_s"], r["nu"] / r["n_s"], k)
    if model == "generic":
        return predict_threshold(params.n_s, params.theta, k)
    raise ValueError(f"unknown model {model!r}")
