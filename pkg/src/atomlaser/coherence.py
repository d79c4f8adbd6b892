"""Scalar and spectral coherence measures built from correlation series.

Fourier integrals are done by direct quadrature of the Hermitian-extended
correlation: the sampled function is interpolated linearly between grid
points and each segment is integrated exactly against e^{i w tau}
(Filon-type weights), so non-uniform and fairly coarse tau grids are fine.
Beyond the last sample an exponential tail fitted to the end of the series
is integrated analytically.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .dynamics import CorrelationSeries
from .errors import NoConvergence

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumSeries:
    omega: np.ndarray     # offsets from the carrier, rad/time
    values: np.ndarray
    kind: str             # "power" | "intensity_noise"
    flux: float
    coverage: float = float("nan")   # fraction of the flux captured by the grid (power only)


@dataclass(frozen=True)
class Tail:
    """Exponential continuation f(tau) ~ f_end * exp(-rate (tau - tau_end))."""

    value: complex
    rate: float
    start: float
    fitted: bool


def fit_tail(tau, f, fraction: float = 0.25, floor: float = 1e-14) -> Tail:
    """Fit an exponential to the last ``fraction`` of a decaying series."""
    tau = np.asarray(tau, float)
    f = np.asarray(f)
    k0 = int(len(tau) * (1 - fraction))
    k0 = min(k0, len(tau) - 3)
    seg = np.abs(f[k0:])
    if np.any(seg <= floor):
        return Tail(0j, np.inf, tau[-1], False)
    slope = np.polyfit(tau[k0:], np.log(seg), 1)[0]
    return Tail(complex(f[-1]), -slope, tau[-1], True)


def _segment_weights(x):
    """For u in [0, 1]: (int e^{ixu} du, int u e^{ixu} du), stable near x = 0."""
    x = np.asarray(x, float)
    small = np.abs(x) < 0.05
    w0 = np.empty(x.shape, complex)
    w1 = np.empty(x.shape, complex)
    xs = x[small]
    term = np.ones_like(xs, dtype=complex)
    s0 = np.zeros_like(term)
    s1 = np.zeros_like(term)
    for k in range(12):
        s0 += term / (k + 1)
        s1 += term / (k + 2)
        term = term * 1j * xs / (k + 1)
    w0[small], w1[small] = s0, s1
    xl = x[~small]
    e = np.exp(1j * xl)
    w0[~small] = (e - 1) / (1j * xl)
    w1[~small] = e / (1j * xl) + (e - 1) / xl ** 2
    return w0, w1


def half_fourier(tau, f, omega, tail: Tail | None = None) -> np.ndarray:
    """int_0^inf e^{i w tau} f(tau) dtau with f piecewise linear on the grid."""
    tau = np.asarray(tau, float)
    f = np.asarray(f, complex)
    omega = np.atleast_1d(np.asarray(omega, float))
    h = np.diff(tau)
    f0, df = f[:-1], np.diff(f)
    x = omega[:, None] * h[None, :]
    w0, w1 = _segment_weights(x)
    phase = np.exp(1j * omega[:, None] * tau[None, :-1])
    out = (phase * h * (f0 * w0 + df * w1)).sum(axis=1)
    if tail is not None and tail.fitted:
        out += tail.value * np.exp(1j * omega * tail.start) / (tail.rate - 1j * omega)
    return out


def coherence_time(g1: CorrelationSeries, threshold: float = 1e-3) -> float:
    """tau_coh = int_0^inf |g1(tau)| dtau.

    If the series has not decayed below ``threshold`` the remainder is
    supplied by a fitted exponential tail (logged).  A series that has
    essentially not decayed raises NoConvergence.
    """
    mag = g1.magnitude()
    body = float(np.trapezoid(mag, g1.tau))
    if mag[-1] < threshold:
        return body
    tail = fit_tail(g1.tau, mag)
    span = g1.tau[-1] - g1.tau[0]
    if not tail.fitted or tail.rate * span < 1e-2 or mag[-1] > 0.99 * mag[0]:
        raise NoConvergence("|g1| does not decay on the sampled window")
    log.info("coherence time uses an extrapolated tail from tau=%.3g", g1.tau[-1])
    return body + mag[-1] / tail.rate


def power_spectrum(g1: CorrelationSeries, flux: float | None = None, omega=None) -> SpectrumSeries:
    """P(w) = (1/2pi) int e^{iw tau} G1(tau) dtau with G1 = flux * g1 and G1(-tau) = G1(tau)*."""
    flux = g1.flux if flux is None else flux
    omega = np.asarray(omega, float)
    G = flux * g1.values
    vals = half_fourier(g1.tau, G, omega, fit_tail(g1.tau, G)).real / np.pi
    cov = float(np.trapezoid(vals, omega) / flux) if flux > 0 and len(omega) > 1 else float("nan")
    return SpectrumSeries(omega, vals, "power", flux, cov)


def intensity_noise_spectrum(g2: CorrelationSeries, flux: float | None = None, omega=None) -> SpectrumSeries:
    """S(w) = 1 + flux * int e^{iw tau} [g2(tau) - 1] dtau, g2 extended evenly.

    The shot-noise term is the constant 1.
    """
    flux = g2.flux if flux is None else flux
    omega = np.asarray(omega, float)
    excess = np.real(g2.values) - 1.0
    if abs(excess[-1]) >= 1e-4:
        log.warning("g2 - 1 = %.2e at the end of the grid; tail is extrapolated", excess[-1])
    tail = fit_tail(g2.tau, excess, floor=1e-12)
    # the tail fit needs a one-signed, decaying remainder
    if tail.fitted and (tail.rate <= 0 or np.any(np.sign(excess[-4:]) != np.sign(excess[-1]))):
        tail = Tail(0j, np.inf, g2.tau[-1], False)
    vals = 1.0 + flux * 2.0 * half_fourier(g2.tau, excess, omega, tail).real
    return SpectrumSeries(omega, vals, "intensity_noise", flux)


def lorentzian(w, flux, width, center=0.0):
    return flux * width / (2 * np.pi) / ((w - center) ** 2 + (width / 2) ** 2)


def raw_fwhm(spec: SpectrumSeries) -> float:
    """Full width at half maximum by linear interpolation on the grid."""
    w, p = spec.omega, spec.values
    k = int(np.argmax(p))
    half = p[k] / 2
    left = np.flatnonzero(p[:k] < half)
    right = np.flatnonzero(p[k:] < half)
    if not left.size or not right.size:
        raise NoConvergence("spectrum does not fall to half maximum inside the grid")
    i, j = left[-1], k + right[0]
    wl = np.interp(half, [p[i], p[i + 1]], [w[i], w[i + 1]])
    wr = np.interp(half, [p[j], p[j - 1]], [w[j], w[j - 1]])
    return float(wr - wl)


def spectral_width(spec: SpectrumSeries, max_residual: float = 0.05):
    """Linewidth as FWHM of a Lorentzian fit; raw FWHM if the fit is poor.

    Returns ``(delta_omega, method)`` with method "lorentzian" or "raw".
    """
    raw = raw_fwhm(spec)
    k = int(np.argmax(spec.values))
    guess = (spec.values[k] * np.pi * raw / 2, raw, spec.omega[k])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(lorentzian, spec.omega, spec.values, p0=guess, maxfev=5000)
    except RuntimeError:
        return raw, "raw"
    resid = np.abs(lorentzian(spec.omega, *popt) - spec.values).max() / spec.values.max()
    if resid > max_residual:
        return raw, "raw"
    return float(abs(popt[1])), "lorentzian"


def bosons_per_mode(flux: float, delta_omega: float) -> float:
    """Bose degeneracy of the output beam, <I> / delta_omega."""
    if not delta_omega > 0:
        raise ValueError("delta_omega must be positive")
    return flux / delta_omega
