"""Single-particle beam scales: monochromaticity, dispersion, acceleration.

Units are whatever the caller supplies through ``hbar``, ``c`` and ``mass``
(natural units by default).  For a massive beam only the kinetic energy is
counted, so omega = hbar k^2 / 2M and d(omega)/omega = 2 dk/k.  Frequencies
are referred to the frame in which the source is at rest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import IncompleteDescriptor, NotApplicable

PHOTON, MASSIVE = "photon", "massive"


@dataclass(frozen=True)
class BeamDescriptor:
    species: str
    k_bar: float
    delta_k: float
    mass: float | None = None
    hbar: float = 1.0
    c: float = 1.0
    # derived by derive_beam_scales
    omega_bar: float | None = None
    delta_omega: float | None = None
    wavelength: float | None = None
    l_coh: float | None = None
    l_disp: float | None = None      # None for photons, inf when delta_k = 0
    tau_disp: float | None = None

    @property
    def monochromaticity(self) -> float:
        """delta_k / k_bar."""
        return self.delta_k / self.k_bar

    def ordering(self) -> dict:
        """Ratios l_disp/l_coh and l_coh/lambda; both should be large."""
        out = {"l_coh/wavelength": self.l_coh / self.wavelength}
        if self.l_disp is not None:
            out["l_disp/l_coh"] = self.l_disp / self.l_coh
        return out


def _div(num, den):
    return math.inf if den == 0 else num / den


def derive_beam_scales(beam: BeamDescriptor) -> BeamDescriptor:
    """Fill in frequencies, coherence length and (for massive beams) dispersion scales.

    tau_disp = M / (2 hbar dk^2) is when the variance of a minimum-uncertainty
    Gaussian with dx = 1/(2 dk) doubles; l_disp = tau_disp * hbar k / M.
    """
    if beam.species not in (PHOTON, MASSIVE):
        raise ValueError(f"unknown species {beam.species!r}")
    if not (beam.k_bar > 0 and beam.delta_k >= 0):
        raise ValueError("need k_bar > 0 and delta_k >= 0")
    k, dk = beam.k_bar, beam.delta_k
    common = dict(wavelength=2 * math.pi / k, l_coh=_div(1.0, dk))
    if beam.species == PHOTON:
        return replace(beam, omega_bar=beam.c * k, delta_omega=beam.c * dk,
                       l_disp=None, tau_disp=None, **common)
    if beam.mass is None:
        raise IncompleteDescriptor("massive beam needs a mass")
    m, hbar = beam.mass, beam.hbar
    omega = hbar * k * k / (2 * m)
    # ratios first keeps the worked examples exact in floating point
    return replace(beam, omega_bar=omega, delta_omega=2 * omega * (dk / k),
                   tau_disp=_div(_div(m / hbar, 2 * dk), dk),
                   l_disp=_div(_div(k, dk), 2 * dk), **common)


def is_monochromatic(beam: BeamDescriptor) -> bool:
    return beam.delta_k < beam.k_bar


def accelerate_beam(beam: BeamDescriptor, zeta: float) -> BeamDescriptor:
    """Longitudinal acceleration with zeta^2 = omega'/omega: k -> zeta k, dk -> dk/zeta.

    delta_omega is unchanged, so the flux-to-linewidth ratio is too.
    """
    if beam.species != MASSIVE:
        raise NotApplicable("photon beams are not accelerated longitudinally")
    if not zeta > 0:
        raise ValueError("zeta must be positive")
    return derive_beam_scales(replace(beam, k_bar=beam.k_bar * zeta, delta_k=beam.delta_k / zeta))


def zeta_from_drop(mass: float, g_grav: float, drop: float, omega_bar: float,
                   hbar: float = 1.0) -> float:
    """zeta for a beam lowered by ``drop``: omega' = omega + M g d / hbar."""
    return math.sqrt((omega_bar + mass * g_grav * drop / hbar) / omega_bar)
