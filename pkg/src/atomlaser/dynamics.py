"""Steady states, time evolution and two-time correlations.

Two-time correlations use the quantum regression theorem: for an operator
pair (A, B) and steady state rho, <A(t+tau) B(t)> = Tr[A e^{L tau}(B rho)].
The intracavity correlators, normalized, stand in for those of the output
beam, with mean output flux kappa * <n>.

Both the steady-state solve and the propagation first restrict L to the
index set it actually couples (connected components of its sparsity graph,
or the set reachable from the initial vector).  For phase-invariant models
this shrinks a D**2 problem to size D without any approximation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .errors import (NonUniqueSteadyState, SolverFailure, StiffnessFailure,
                     UndefinedNormalization)
from .operators import DensityMatrix, annihilation, expectation
from .superops import Superoperator, unvec, vec

log = logging.getLogger(__name__)

#: Bordered systems up to this many rows are factorized directly.
DIRECT_LIMIT = 10_000
#: Reduced propagators up to this size are exponentiated densely.
DENSE_LIMIT = 2000


def _pattern(m):
    p = sp.csr_matrix(m, copy=True)
    p.data = np.ones_like(p.data, dtype=np.int8)
    return p


def _reachable(m, start):
    """Indices reachable from the boolean mask ``start`` under repeated application of m."""
    p = _pattern(m).astype(np.int32)
    mask = np.asarray(start, dtype=bool)
    while True:
        new = mask | (p @ mask.astype(np.int32) > 0)
        if new.sum() == mask.sum():
            return np.flatnonzero(mask)
        mask = new


def _residual_scale(m):
    return max(1.0, float(np.abs(m.data).max()) if m.nnz else 1.0)


def steady_state(L: Superoperator, method: str = "auto", tol: float = 1e-10,
                 direct_limit: int = DIRECT_LIMIT) -> DensityMatrix:
    """Stationary state of a trace-preserving generator.

    One population row of L is replaced by the trace functional (that row is
    linearly dependent on the others when L preserves trace) and the bordered
    system is solved: sparse LU when small enough, ILU-preconditioned
    restarted GMRES otherwise.  The residual check ``max|L rho| <= tol`` is
    relative to the largest rate in L when that exceeds one.
    """
    m = L.matrix
    d = L.dim
    n = d * d
    diag = np.arange(d) * (d + 1)
    sym = _pattern(m) + _pattern(m).T
    _, labels = connected_components(sym, directed=False)
    idx = np.flatnonzero(np.isin(labels, np.unique(labels[diag])))
    sub = m[idx][:, idx].tolil()
    pos = np.searchsorted(idx, diag)
    row = pos[0]
    sub[row, :] = 0
    sub[row, pos] = 1.0
    rhs = np.zeros(len(idx), complex)
    rhs[row] = 1.0
    a = sub.tocsc()

    if method == "auto":
        method = "direct" if len(idx) <= direct_limit else "iterative"
    log.debug("steady state: %d of %d rows, %s", len(idx), n, method)
    if method == "direct":
        try:
            x = spla.splu(a).solve(rhs)
        except RuntimeError as exc:
            raise NonUniqueSteadyState(f"bordered Liouvillian is singular: {exc}") from exc
    elif method == "iterative":
        try:
            ilu = spla.spilu(a, drop_tol=1e-8, fill_factor=20)
        except RuntimeError as exc:
            raise NonUniqueSteadyState(f"bordered Liouvillian is singular: {exc}") from exc
        pre = spla.LinearOperator(a.shape, ilu.solve, dtype=complex)
        x, info = spla.gmres(a, rhs, M=pre, rtol=1e-14, atol=0.0, restart=50, maxiter=200)
        if info != 0:
            raise SolverFailure(f"GMRES did not converge (info={info})")
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(x)):
        raise NonUniqueSteadyState("steady-state solve produced non-finite values")

    full = np.zeros(n, complex)
    full[idx] = x
    resid = np.abs(m @ full).max()
    if resid > tol * _residual_scale(m):
        raise SolverFailure(f"steady-state residual {resid:.2e} exceeds tolerance")
    return DensityMatrix.from_unnormalized(unvec(full, d), L.dims)


class _Propagator:
    """exp(L t) restricted to the subspace reachable from one initial vector."""

    def __init__(self, m, v0):
        self.idx = _reachable(m, np.abs(v0) > 0)
        sub = m[self.idx][:, self.idx]
        self.dense = len(self.idx) <= DENSE_LIMIT
        self.sub = sub.toarray() if self.dense else sub.tocsc()
        self.v = v0[self.idx]
        self._dt = None
        self._step = None

    def advance(self, dt):
        if dt <= 0:
            return self.v
        if not self.dense:
            self.v = spla.expm_multiply(self.sub * dt, self.v)
        else:
            if self._dt is None or abs(dt - self._dt) > 1e-12 * dt:
                self._step = la.expm(self.sub * dt)
                self._dt = dt
            self.v = self._step @ self.v
        if not np.all(np.isfinite(self.v)):
            raise StiffnessFailure("propagation produced non-finite values")
        return self.v

    def run(self, times):
        out = np.empty((len(times), len(self.idx)), complex)
        t_prev = 0.0
        for k, t in enumerate(times):
            out[k] = self.advance(t - t_prev)
            t_prev = t
        return out


def evolve(L: Superoperator, rho0, t: float, trace_tol: float = 1e-9) -> DensityMatrix:
    """exp(L t) rho0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    v0 = vec(rho0)
    prop = _Propagator(L.matrix, v0)
    full = np.zeros_like(v0)
    full[prop.idx] = prop.advance(float(t))
    rho = unvec(full, L.dim)
    drift = abs(np.trace(rho) - np.trace(unvec(v0, L.dim)))
    if drift > trace_tol:
        raise StiffnessFailure(f"trace drifted by {drift:.2e}")
    return DensityMatrix.from_unnormalized(rho, L.dims)


# -- correlation functions ---------------------------------------------------

@dataclass(frozen=True)
class CorrelationSeries:
    """Sampled normalized correlation function (g1 complex, g2 real)."""

    tau: np.ndarray
    values: np.ndarray
    mean_n: float
    kappa: float
    kind: str

    @property
    def flux(self) -> float:
        """Mean output flux kappa * <n>."""
        return self.kappa * self.mean_n

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


def tau_grid(max_tau: float, points: int, spacing: str = "linear") -> np.ndarray:
    if spacing == "linear":
        return np.linspace(0.0, max_tau, points)
    if spacing == "log":
        return np.concatenate([[0.0], np.geomspace(max_tau * 1e-3, max_tau, points - 1)])
    raise ValueError(f"unknown spacing {spacing!r}")


def _regression(L, rho, left, right_l, right_r, taus):
    """Tr[left e^{L tau}(right_l rho right_r)] on the tau grid."""
    r = rho.data
    x0 = right_l @ r if right_r is None else right_l @ r @ right_r
    v0 = vec(x0)
    prop = _Propagator(L.matrix, v0)
    w = vec(np.asarray(left.T.toarray() if sp.issparse(left) else left.T))[prop.idx]
    return prop.run(np.asarray(taus, float)) @ w


def _setup(L, a, rho_ss, kappa):
    if a is None:
        a = L.meta.get("mode_a")
        if a is None:
            a = annihilation(L.dim)
    a = sp.csr_matrix(a)
    if rho_ss is None:
        rho_ss = steady_state(L)
    if kappa is None:
        kappa = L.meta.get("kappa", 1.0)
    mean_n = float(np.real(expectation(a.conj().T @ a, rho_ss)))
    if mean_n <= 0:
        raise UndefinedNormalization("steady-state occupation is zero")
    return a, rho_ss, kappa, mean_n


def correlation_g1(L: Superoperator, a=None, tau=None, rho_ss=None, kappa=None) -> CorrelationSeries:
    """g1(tau) = Tr[a^dag e^{L tau}(a rho_ss)] / <a^dag a>."""
    a, rho_ss, kappa, mean_n = _setup(L, a, rho_ss, kappa)
    tau = np.asarray(tau, float)
    vals = _regression(L, rho_ss, a.conj().T, a, None, tau) / mean_n
    return CorrelationSeries(tau, vals, mean_n, kappa, "g1")


def correlation_g2(L: Superoperator, a=None, tau=None, rho_ss=None, kappa=None) -> CorrelationSeries:
    """g2(tau) = Tr[a^dag a e^{L tau}(a rho_ss a^dag)] / <a^dag a>^2."""
    a, rho_ss, kappa, mean_n = _setup(L, a, rho_ss, kappa)
    tau = np.asarray(tau, float)
    ad = a.conj().T
    vals = _regression(L, rho_ss, ad @ a, a, ad, tau) / mean_n ** 2
    if np.abs(vals.imag).max() > 1e-10:
        log.warning("g2 has imaginary residue %.2e", np.abs(vals.imag).max())
    return CorrelationSeries(tau, vals.real, mean_n, kappa, "g2")


@dataclass(frozen=True)
class LinewidthFit:
    gamma: float          # linewidth: |g1| ~ exp(-gamma tau / 2)
    window: float         # fit used tau <= window
    truncated: bool       # series ended before two decay constants


def fit_linewidth(g1: CorrelationSeries) -> LinewidthFit:
    """Log-linear least squares on |g1| over its first two decay constants."""
    mag = g1.magnitude()
    below = np.flatnonzero(mag <= np.exp(-2.0))
    end = below[0] if below.size else len(mag) - 1
    end = max(end, 2)
    t, y = g1.tau[: end + 1], np.log(mag[: end + 1])
    slope = np.polyfit(t, y, 1)[0]
    return LinewidthFit(-2.0 * slope, float(t[-1]), not below.size)


def is_monotone(series: CorrelationSeries, tol: float = 1e-9) -> bool:
    """|values| never increase along the grid (up to tol); a solver sanity check."""
    return bool(np.all(np.diff(series.magnitude()) <= tol))
