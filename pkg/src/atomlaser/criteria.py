"""Quantitative laser gate: conditions (1)-(4) evaluated on a source.

(1) directional output, declared by the caller (no spatial solver here);
(2) monochromatic: delta_k / k_bar <= eps2;
(3) small intensity fluctuations: sup |g2(tau) - 1| <= eps3;
(4) small phase fluctuations: <I> * tau_coh >= M4.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .coherence import bosons_per_mode, coherence_time
from .dynamics import CorrelationSeries
from .errors import IncompleteInput
from .kinematics import BeamDescriptor

LASER, NOT_LASER, INDETERMINATE = "laser", "not-laser", "indeterminate"


@dataclass(frozen=True)
class Thresholds:
    eps2: float = 0.01
    eps3: float = 0.1
    m4: float = 100.0
    include_zero: bool = False   # condition 3 over tau >= 0 instead of tau > 0


@dataclass(frozen=True)
class ConditionResult:
    value: float
    threshold: float
    passed: bool
    margin: float     # > 1 means passing with room to spare


@dataclass(frozen=True)
class DeclaredDirectionality:
    directional: bool | None
    transverse_modes: int | None = None

    @property
    def passed(self) -> bool | None:
        return self.directional

    @property
    def single_mode(self) -> bool | None:
        return None if self.transverse_modes is None else self.transverse_modes == 1


@dataclass
class CriteriaReport:
    condition1: DeclaredDirectionality
    condition2: ConditionResult | None
    condition3: ConditionResult | None
    condition4: ConditionResult | None
    thresholds_used: Thresholds
    verdict: str = field(init=False)

    def __post_init__(self):
        evaluated = [c.passed for c in (self.condition2, self.condition3, self.condition4)
                     if c is not None]
        if self.condition1.passed is False or not all(evaluated):
            self.verdict = NOT_LASER
        elif self.condition1.passed and len(evaluated) == 3:
            self.verdict = LASER
        else:
            self.verdict = INDETERMINATE

    def failed(self) -> list:
        names = ["condition2", "condition3", "condition4"]
        out = [n for n in names if getattr(self, n) is not None and not getattr(self, n).passed]
        if self.condition1.passed is False:
            out.insert(0, "condition1")
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["condition1"]["passed"] = self.condition1.passed
        d["condition1"]["single_mode"] = self.condition1.single_mode
        d["verdict"] = self.verdict
        d["failed"] = self.failed()
        return d


def _ratio(num, den):
    return np.inf if den == 0 else num / den


def condition2(beam: BeamDescriptor, eps2: float) -> ConditionResult:
    r = beam.monochromaticity
    return ConditionResult(r, eps2, r <= eps2, _ratio(eps2, r))


def condition3(g2: CorrelationSeries, eps3: float, include_zero: bool = False) -> ConditionResult:
    mask = np.ones_like(g2.tau, bool) if include_zero else g2.tau > 0
    dev = float(np.abs(np.real(g2.values[mask]) - 1.0).max())
    return ConditionResult(dev, eps3, dev <= eps3, _ratio(eps3, dev))


def condition4(g1: CorrelationSeries, flux: float, m4: float) -> ConditionResult:
    v = flux * coherence_time(g1)
    return ConditionResult(v, m4, v >= m4, v / m4)


def evaluate_criteria(beam: BeamDescriptor | None, g2: CorrelationSeries | None,
                      g1: CorrelationSeries | None, flux: float | None = None,
                      thresholds: Thresholds = Thresholds(),
                      directional: bool | None = True,
                      transverse_modes: int | None = 1) -> CriteriaReport:
    """Run the gate.  Missing inputs raise IncompleteInput carrying the partial report."""
    t = thresholds
    if flux is None and g1 is not None:
        flux = g1.flux
    report = CriteriaReport(
        DeclaredDirectionality(directional, transverse_modes),
        condition2(beam, t.eps2) if beam is not None else None,
        condition3(g2, t.eps3, t.include_zero) if g2 is not None else None,
        condition4(g1, flux, t.m4) if g1 is not None else None,
        t,
    )
    missing = [n for n, x in (("beam", beam), ("g2", g2), ("g1", g1)) if x is None]
    if missing:
        raise IncompleteInput(f"missing input(s): {', '.join(missing)}", report)
    return report


class ThermalReference(NamedTuple):
    g1: CorrelationSeries
    g2: CorrelationSeries
    flux: float
    delta_omega: float
    bosons_per_mode: float


def filtered_thermal_reference(mu: float, kappa: float = 1.0, tau=None) -> ThermalReference:
    """Analytic statistics of a linear amplifier / narrowly filtered thermal beam.

    |g1| = exp(-kappa tau / (2(mu+1))), g2 = 1 + |g1|^2, flux kappa*mu,
    linewidth kappa/(mu+1).  Bose degenerate, yet bunched.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    width = kappa / (mu + 1.0)
    if tau is None:
        tau = np.linspace(0.0, 30.0 / width, 1201)
    tau = np.asarray(tau, float)
    g1v = np.exp(-0.5 * width * tau)
    g1 = CorrelationSeries(tau, g1v.astype(complex), mu, kappa, "g1")
    g2 = CorrelationSeries(tau, 1.0 + g1v ** 2, mu, kappa, "g2")
    flux = kappa * mu
    return ThermalReference(g1, g2, flux, width, bosons_per_mode(flux, width))
