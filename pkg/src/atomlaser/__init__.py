"""Master-equation toolkit for boson lasers, amplifiers and their coherence statistics."""

__version__ = "0.1.0"

from .criteria import CriteriaReport, Thresholds, evaluate_criteria  # noqa: E402
from .dynamics import (correlation_g1, correlation_g2, evolve, fit_linewidth,  # noqa: E402
                       steady_state, tau_grid)
from .errors import AtomLaserError  # noqa: E402
from .models import (ModelParams, generic_laser, ideal_laser, linear_amplifier,  # noqa: E402
                     micromaser_gain_apply, sg_laser, three_mode_laser, two_mode_reduced)
from .operators import DensityMatrix  # noqa: E402
from .superops import Superoperator  # noqa: E402

__all__ = [
    "AtomLaserError", "CriteriaReport", "DensityMatrix", "ModelParams", "Superoperator",
    "Thresholds", "correlation_g1", "correlation_g2", "evaluate_criteria", "evolve",
    "fit_linewidth", "generic_laser", "ideal_laser", "linear_amplifier",
    "micromaser_gain_apply", "sg_laser", "steady_state", "tau_grid", "three_mode_laser",
    "two_mode_reduced",
]
