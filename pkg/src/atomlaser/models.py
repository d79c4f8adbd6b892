"""Laser and amplifier Liouvillians, plus the one-atom-at-a-time gain map."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np
import scipy.linalg as la

from .errors import (BudgetExceeded, InvalidState, MissingParameter, TooLarge,
                     TruncationTooSmall)
from .operators import (DensityMatrix, annihilation, embed, jc_hamiltonian,
                        sg_lowering)
from .superops import Superoperator, dissipator, hamiltonian_comm, scaled_inverse_gain

log = logging.getLogger(__name__)

#: "much greater" / "much less" factors used by the regime guards.
MUCH_GREATER = 20.0
MUCH_LESS = 0.05

#: Largest joint Hilbert-space dimension a multimode builder will accept.
DEFAULT_DIM_CAP = 2048


@dataclass
class ModelParams:
    """Rates and dimensionless parameters shared by every model.

    Rates are in inverse time; ``mu``, ``nu``, ``n_s``, ``theta``, ``N`` and
    ``epsilon`` are dimensionless.  Any two of ``nu``, ``n_s``, ``theta``
    determine the third.
    """

    kappa: float = 1.0
    mu: float | None = None
    nu: float | None = None
    n_s: float | None = None
    theta: float | None = None
    gamma: float | None = None
    N: float | None = None
    g: float | None = None
    lam: float | None = None
    eta: float | None = None
    Omega: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None and f.name != "theta" and v < 0:
                raise ValueError(f"{f.name} must be non-negative, got {v}")
        nu, ns, th = self.nu, self.n_s, self.theta
        if nu is not None and ns is not None:
            derived = nu / ns if ns > 0 else np.inf
            if th is not None and abs(th - derived) > 1e-12 * max(1.0, abs(derived)):
                raise ValueError(f"theta={th} inconsistent with nu/n_s={derived}")
            self.theta = derived
        elif th is not None and ns is not None:
            self.nu = th * ns
        elif th is not None and nu is not None:
            self.n_s = nu / th

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise MissingParameter(f"missing parameter(s): {', '.join(missing)}")

    def as_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}


def regime_guards(p: ModelParams) -> dict:
    """Check the separations of scale the adiabatic eliminations rely on.

    Returns ``{name: (value, ok)}`` for whichever guards the parameters allow.
    """
    out = {}
    if p.lam is not None and p.g:
        out["lambda/g"] = (p.lam / p.g, p.lam / p.g >= MUCH_GREATER)
    if p.gamma is not None and p.kappa:
        out["gamma/kappa"] = (p.gamma / p.kappa, p.gamma / p.kappa >= MUCH_GREATER)
    if p.N is not None:
        out["N"] = (p.N, p.N <= MUCH_LESS)
    return out


def eliminated_rates(p: ModelParams) -> dict:
    """Single-mode parameters obtained by eliminating modes b then c.

    Eliminating b (energy damping lambda*D[b]) leaves eta*D[c a^dag] with
    eta = 4 g^2 / lambda.  Quoting eta = g^2/lambda instead corresponds to b's
    amplitude, not its energy, decaying at rate lambda.
    """
    p.require("g", "lam", "gamma", "N")
    eta = 4.0 * p.g ** 2 / p.lam
    return {"eta": eta, "nu": p.gamma * p.N / p.kappa, "n_s": p.gamma / eta}


# -- single-mode models ------------------------------------------------------

def _tag(L, name, p, **extra):
    return L.with_meta(model=name, kappa=p.kappa, **extra)


def ideal_laser(p: ModelParams, dim: int) -> Superoperator:
    """kappa * (mu D[a^dag] A[a^dag]^{-1} + D[a]): adds bosons one at a time."""
    p.require("kappa", "mu")
    a = annihilation(dim)
    gain = scaled_inverse_gain(a.conj().T, 0.0)
    L = p.kappa * (p.mu * gain + dissipator(a, label="D[a]"))
    return _tag(L, "ideal", p, mu=p.mu)


def sg_laser(p: ModelParams, dim: int) -> Superoperator:
    """kappa * (mu D[e^dag] + D[a]): the same gain with no Bose enhancement."""
    p.require("kappa", "mu")
    e = sg_lowering(dim)
    L = p.kappa * (p.mu * dissipator(e.conj().T, label="D[e+]")
                   + dissipator(annihilation(dim), label="D[a]"))
    return _tag(L, "sg", p, mu=p.mu)


def linear_amplifier(p: ModelParams, dim: int) -> Superoperator:
    """kappa * (mu/(mu+1) D[a^dag] + D[a]), thermal steady state of mean mu."""
    p.require("kappa", "mu")
    a = annihilation(dim)
    L = p.kappa * (p.mu / (p.mu + 1.0) * dissipator(a.conj().T, label="D[a+]")
                   + dissipator(a, label="D[a]"))
    return _tag(L, "linear_amp", p, mu=p.mu)


def generic_laser(p: ModelParams, dim: int) -> Superoperator:
    """kappa * (D[a] + nu D[a^dag] (n_s + A[a^dag])^{-1}), the saturable-gain laser."""
    p.require("kappa", "nu", "n_s")
    if not (p.nu > 0 and p.n_s > 0):
        raise ValueError("generic laser needs nu > 0 and n_s > 0")
    a = annihilation(dim)
    L = p.kappa * (dissipator(a, label="D[a]") + p.nu * scaled_inverse_gain(a.conj().T, p.n_s))
    return _tag(L, "generic", p, nu=p.nu, n_s=p.n_s, theta=p.theta)


# -- multimode models --------------------------------------------------------

def _check_cap(dims, cap):
    total = int(np.prod(dims))
    if total > cap:
        raise TooLarge(f"joint dimension {total} exceeds cap {cap}")


def three_mode_laser(p: ModelParams, dims=(15, 2, 3), dim_cap: int = DEFAULT_DIM_CAP) -> Superoperator:
    """Laser mode a, irreversibility mode b, source mode c (a slowest).

    kappa D[a] - i[g(c^dag a b + c a^dag b^dag), .] + lambda D[b]
    + gamma (N+1) D[c] + gamma N D[c^dag]
    """
    p.require("kappa", "g", "lam", "gamma", "N")
    dims = tuple(int(d) for d in dims)
    _check_cap(dims, dim_cap)
    a, b, c = (embed(annihilation(d), dims, i) for i, d in enumerate(dims))
    h = p.g * (c.conj().T @ a @ b + c @ a.conj().T @ b.conj().T)
    L = (p.kappa * dissipator(a, dims, "D[a]")
         + hamiltonian_comm(h, dims, "H_g")
         + p.lam * dissipator(b, dims, "D[b]")
         + p.gamma * (p.N + 1) * dissipator(c, dims, "D[c]")
         + p.gamma * p.N * dissipator(c.conj().T, dims, "D[c+]"))
    for name, (value, ok) in regime_guards(p).items():
        if not ok:
            log.warning("regime guard %s = %.3g violated", name, value)
    return L.with_meta(model="three_mode", kappa=p.kappa, mode_a=a)


def two_mode_reduced(p: ModelParams, dims=(15, 3), dim_cap: int = DEFAULT_DIM_CAP) -> Superoperator:
    """Laser mode a and source c after eliminating b: eta D[c a^dag] replaces the coupling."""
    p.require("kappa", "eta", "gamma", "N")
    if not p.eta > 0:
        raise ValueError("eta must be positive")
    dims = tuple(int(d) for d in dims)
    _check_cap(dims, dim_cap)
    a, c = (embed(annihilation(d), dims, i) for i, d in enumerate(dims))
    L = (p.kappa * dissipator(a, dims, "D[a]")
         + p.eta * dissipator(c @ a.conj().T, dims, "D[ca+]")
         + p.gamma * (p.N + 1) * dissipator(c, dims, "D[c]")
         + p.gamma * p.N * dissipator(c.conj().T, dims, "D[c+]"))
    return L.with_meta(model="two_mode", kappa=p.kappa, mode_a=a)


# -- micromaser gain ---------------------------------------------------------

class GainResult(NamedTuple):
    state: DensityMatrix
    atoms: int            # atoms sent through before stopping
    residual: float       # probability that no atom has yet emitted


def passage_kraus(dim: int, epsilon: float):
    """Kraus operators (M_e, M_g) of one excited atom crossing the cavity.

    Taken from exp(-i H tau) with the Jaynes-Cummings coupling, conditioned on
    the atom leaving excited (M_e) or in the ground state (M_g).
    """
    u = la.expm(-1j * jc_hamiltonian(dim, 1.0).toarray() * epsilon)
    g, e = slice(0, dim), slice(dim, 2 * dim)
    return u[e, e], u[g, e]


def micromaser_gain_apply(rho, epsilon: float, max_atoms: int = 10_000_000,
                          tol: float = 1e-8, batch: int = 4096) -> GainResult:
    """Average field state once an atom is finally detected in the ground state.

    Atoms are sent through until the cumulative probability that one has
    emitted exceeds ``1 - tol``.  The sum over atom number is done in batches
    using the closed geometric series, which is exact because M_e is diagonal
    in the number basis.
    """
    r = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dim = r.shape[0]
    if epsilon * np.sqrt(dim - 1) > 0.1:
        log.warning("epsilon*sqrt(n_max) = %.3g exceeds 0.1", epsilon * np.sqrt(dim - 1))
    if abs(r[-1, -1]) > 1e-12:
        # the top state never emits in a truncated space
        raise TruncationTooSmall("state has weight in the top number state")
    me, mg = passage_kraus(dim, epsilon)
    ce = np.diag(me)
    if np.abs(me - np.diag(ce)).max() > 1e-12:
        raise InvalidState("excited-atom Kraus operator is not diagonal")
    q = np.outer(ce, ce.conj())
    state = r.copy()
    acc = np.zeros_like(r)
    atoms = 0
    emitted = 0.0
    while emitted < 1.0 - tol:
        k = min(batch, max_atoms - atoms)
        if k <= 0:
            raise BudgetExceeded(
                f"only {emitted:.3g} of the emission probability after {atoms} atoms")
        qk = q ** k
        with np.errstate(divide="ignore", invalid="ignore"):
            geom = np.where(np.abs(1 - q) > 1e-300, (1 - qk) / (1 - q), k)
        acc += mg @ (geom * state) @ mg.conj().T
        state = qk * state
        atoms += k
        emitted = float(np.real(np.trace(acc)))
    residual = float(np.real(np.trace(state)))
    return GainResult(DensityMatrix.from_unnormalized(acc), atoms, residual)
