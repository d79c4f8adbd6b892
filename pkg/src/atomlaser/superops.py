"""Superoperators on column-stacked operators.

Convention: ``vec(X) = X.flatten(order="F")``, so that
``vec(A X B) = kron(B.T, A) @ vec(X)``.  All superoperators are stored as
sparse CSR matrices of shape (D**2, D**2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, NotHermitian, NotInvertible
from .operators import DensityMatrix, TOLERANCES, creation


def vec(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        x = x.data
    if sp.issparse(x):
        x = x.toarray()
    return np.asarray(x, dtype=complex).flatten(order="F")


def unvec(v, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class Superoperator:
    """Linear map on vectorized D x D operators.

    ``dims`` holds the per-mode truncations of the underlying Hilbert space,
    ``labels`` the constituent terms (for diagnostics) and ``meta`` loose
    model information such as the output coupling rate ``kappa``.
    """

    matrix: sp.csr_matrix
    dims: tuple
    labels: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        d = int(np.prod(self.dims))
        if m.shape != (d * d, d * d):
            raise DimensionMismatch(f"matrix {m.shape} does not act on dims {self.dims}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def apply(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    __call__ = apply

    def _check(self, other):
        if other.dims != self.dims:
            raise DimensionMismatch(f"dims {self.dims} vs {other.dims}")

    def __add__(self, other):
        self._check(other)
        return Superoperator(self.matrix + other.matrix, self.dims,
                             self.labels + other.labels, {**other.meta, **self.meta})

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        labels = tuple(f"{scalar:g}*{lab}" for lab in self.labels) if scalar != 1 else self.labels
        return Superoperator(scalar * self.matrix, self.dims, labels, dict(self.meta))

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition: (self @ other)(rho) = self(other(rho))."""
        self._check(other)
        labels = (f"({'+'.join(self.labels)})o({'+'.join(other.labels)})",)
        return Superoperator(self.matrix @ other.matrix, self.dims, labels,
                             {**other.meta, **self.meta})

    def with_meta(self, **kw):
        return Superoperator(self.matrix, self.dims, self.labels, {**self.meta, **kw})

    def adjoint_on(self, op) -> np.ndarray:
        """Heisenberg-picture action L^dag(op), defined by Tr(op L(rho)) = Tr(L^dag(op) rho)."""
        w = vec(np.asarray(op.toarray() if sp.issparse(op) else op).T)
        return unvec(self.matrix.T @ w, self.dim).T

    def trace_defect(self) -> float:
        """max |L^dag(I)|; zero for a trace-preserving generator."""
        return float(np.abs(self.adjoint_on(np.eye(self.dim))).max())

    def hermiticity_defect(self, rng=None, samples: int = 3) -> float:
        rng = np.random.default_rng(rng)
        worst = 0.0
        for _ in range(samples):
            g = rng.normal(size=(self.dim, self.dim)) + 1j * rng.normal(size=(self.dim, self.dim))
            h = g + g.conj().T
            out = self.apply(h)
            worst = max(worst, float(np.abs(out - out.conj().T).max()))
        return worst

    def population_generator(self) -> np.ndarray:
        """Restriction to diagonal -> diagonal entries (the classical rate matrix)."""
        idx = np.arange(self.dim) * (self.dim + 1)
        return self.matrix[idx][:, idx].toarray()


def _dim_of(c):
    if c.shape[0] != c.shape[1]:
        raise DimensionMismatch(f"operator must be square, got {c.shape}")
    return c.shape[0]


def _eye(d):
    return sp.identity(d, format="csr", dtype=complex)


def spre(op) -> sp.csr_matrix:
    op = sp.csr_matrix(op, dtype=complex)
    return sp.kron(_eye(op.shape[0]), op, format="csr")


def spost(op) -> sp.csr_matrix:
    op = sp.csr_matrix(op, dtype=complex)
    return sp.kron(op.T, _eye(op.shape[0]), format="csr")


def _wrap(matrix, c, label, dims):
    d = _dim_of(c)
    return Superoperator(matrix, dims or (d,), (label,))


def jump(c, dims=None, label="J") -> Superoperator:
    """J[c] rho = c rho c^dag."""
    c = sp.csr_matrix(c, dtype=complex)
    return _wrap(sp.kron(c.conj(), c, format="csr"), c, label, dims)


def anticomm(c, dims=None, label="A") -> Superoperator:
    """A[c] rho = (c^dag c rho + rho c^dag c) / 2."""
    c = sp.csr_matrix(c, dtype=complex)
    cc = (c.conj().T @ c).tocsr()
    return _wrap(0.5 * (spre(cc) + spost(cc)), c, label, dims)


def dissipator(c, dims=None, label="D") -> Superoperator:
    """D[c] = J[c] - A[c]."""
    c = sp.csr_matrix(c, dtype=complex)
    cc = (c.conj().T @ c).tocsr()
    m = sp.kron(c.conj(), c, format="csr") - 0.5 * (spre(cc) + spost(cc))
    return _wrap(m, c, label, dims)


def hamiltonian_comm(h, dims=None, label="H") -> Superoperator:
    """rho -> -i[H, rho]."""
    h = sp.csr_matrix(h, dtype=complex)
    if h.shape[0] and abs(h - h.conj().T).max() > TOLERANCES.hermitian:
        raise NotHermitian("Hamiltonian is not Hermitian")
    return _wrap(-1j * (spre(h) - spost(h)), h, label, dims)


def _is_creation(c) -> bool:
    d = c.shape[0]
    return d >= 2 and abs(sp.csr_matrix(c) - creation(d)).max() < 1e-14


def _gain_weights(c, offset: float):
    """Return (V, W): (offset + A[c])^{-1} X = V [W * (V^dag X V)] V^dag.

    For c = a^dag the number basis diagonalizes a a^dag with eigenvalues n + 1,
    taken from the untruncated operator so the top state stays invertible.
    """
    d = _dim_of(c)
    if _is_creation(c):
        lam = np.arange(1, d + 1, dtype=float)
        vecs = None
    else:
        cd = sp.csr_matrix(c).toarray()
        lam, vecs = np.linalg.eigh(cd.conj().T @ cd)
    w = offset + 0.5 * (lam[:, None] + lam[None, :])
    if np.any(np.abs(w) < 1e-12):
        raise NotInvertible("offset + A[c] has a zero eigenvalue")
    return vecs, 1.0 / w


def anticomm_inverse_apply(c, rho) -> np.ndarray:
    """Solve (c^dag c X + X c^dag c)/2 = rho for X.

    For c = a^dag this is X_mn = 2 rho_mn / ((m + 1) + (n + 1)).
    """
    vecs, w = _gain_weights(c, 0.0)
    r = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if vecs is None:
        return w * r
    return vecs @ (w * (vecs.conj().T @ r @ vecs)) @ vecs.conj().T


def inverse_gain_matrix(c, n_s: float) -> sp.csr_matrix:
    """Superoperator matrix of (n_s + A[c])^{-1}."""
    if n_s < 0:
        raise ValueError("n_s must be non-negative")
    vecs, w = _gain_weights(c, float(n_s))
    diag = sp.diags(w.flatten(order="F"), format="csr", dtype=complex)
    if vecs is None:
        return diag
    to_eig = sp.csr_matrix(np.kron(vecs.T, vecs.conj().T))
    from_eig = sp.csr_matrix(np.kron(vecs.conj(), vecs))
    return (from_eig @ diag @ to_eig).tocsr()


def scaled_inverse_gain(c, n_s: float = 0.0) -> Superoperator:
    """rho -> D[c] (n_s + A[c])^{-1} rho.

    With n_s = 0 and c = a^dag this is the state-independent one-boson gain;
    for n_s >> A[c] it tends to D[c] / n_s.
    """
    d = _dim_of(c)
    m = dissipator(c).matrix @ inverse_gain_matrix(c, n_s)
    return Superoperator(m.tocsr(), (d,), (f"D(ns={n_s:g}+A)^-1",))
