"""Operators and states on a truncated number basis.

Operators are plain ``scipy.sparse`` CSR matrices; the dimension is the
matrix size ``D = n_max + 1``.  Density matrices are wrapped in
:class:`DensityMatrix`, which validates the physical invariants on
construction and records how much probability sits in the top number state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import stats

from .errors import DimensionMismatch, InvalidDimension, InvalidState, TruncationTooSmall


@dataclass
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-10
    positivity: float = -1e-8
    poisson_tail: float = 1e-9


#: Global tolerances; mutate fields to loosen or tighten checks everywhere.
TOLERANCES = Tolerances()


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def annihilation(dim: int) -> sp.csr_matrix:
    """Bosonic lowering operator, <n-1|a|n> = sqrt(n)."""
    dim = _check_dim(dim)
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, shape=(dim, dim),
                    format="csr", dtype=complex)


def creation(dim: int) -> sp.csr_matrix:
    return annihilation(dim).conj().T.tocsr()


def sg_lowering(dim: int) -> sp.csr_matrix:
    """Susskind-Glogower phase operator: ones on the first superdiagonal."""
    dim = _check_dim(dim)
    return sp.diags(np.ones(dim - 1), 1, shape=(dim, dim), format="csr", dtype=complex)


def number(dim: int) -> sp.csr_matrix:
    dim = _check_dim(dim)
    return sp.diags(np.arange(dim, dtype=float), 0, format="csr", dtype=complex)


def identity(dim: int) -> sp.csr_matrix:
    return sp.identity(_check_dim(dim), format="csr", dtype=complex)


def projector(dim: int, n: int) -> sp.csr_matrix:
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimension(f"number state {n} outside 0..{dim - 1}")
    return sp.csr_matrix(([1.0 + 0j], ([n], [n])), shape=(dim, dim))


def embed(op, dims, index):
    """Lift a single-mode operator into a tensor product, first mode slowest."""
    factors = [identity(d) for d in dims]
    factors[index] = sp.csr_matrix(op)
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return out


# -- two-level atom (basis order |g>, |e>) -----------------------------------

def atom_lowering() -> sp.csr_matrix:
    """sigma = |g><e| with |g> = index 0, |e> = index 1."""
    return sp.csr_matrix(([1.0 + 0j], ([0], [1])), shape=(2, 2))


def jc_hamiltonian(dim: int, rabi: float) -> sp.csr_matrix:
    """H = i*rabi*(sigma a^dag - sigma^dag a) on atom (x) field, atom index slowest."""
    a = annihilation(dim)
    s = atom_lowering()
    h = sp.kron(s, a.conj().T) - sp.kron(s.conj().T, a)
    return (1j * rabi * h).tocsr()


def excitation_number(dim: int) -> sp.csr_matrix:
    """a^dag a + sigma^dag sigma on the joint atom-field space."""
    s = atom_lowering()
    return (sp.kron(identity(2), number(dim)) + sp.kron(s.conj().T @ s, identity(dim))).tocsr()


# -- states -------------------------------------------------------------------

@dataclass(frozen=True)
class DensityMatrix:
    """Validated density operator.

    ``dims`` lists the per-mode truncations (first mode slowest) and defaults
    to a single mode.  ``tail_bound`` is the largest population found in the
    top number state of any mode, which is how truncation starvation shows up.
    """

    data: np.ndarray
    dims: tuple = field(default=None)

    def __post_init__(self):
        rho = np.asarray(self.data, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidState(f"density matrix must be square, got shape {rho.shape}")
        dims = self.dims or (rho.shape[0],)
        if int(np.prod(dims)) != rho.shape[0]:
            raise DimensionMismatch(f"dims {dims} do not multiply to {rho.shape[0]}")
        tol = TOLERANCES
        if np.abs(rho - rho.conj().T).max() > tol.hermitian:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > tol.trace:
            raise InvalidState(f"trace {np.trace(rho).real:.3g} != 1")
        if np.linalg.eigvalsh(rho).min() < tol.positivity:
            raise InvalidState("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "data", rho)
        object.__setattr__(self, "dims", tuple(int(d) for d in dims))

    @classmethod
    def from_unnormalized(cls, rho, dims=None):
        rho = np.asarray(rho, dtype=complex)
        rho = 0.5 * (rho + rho.conj().T)
        return cls(rho / np.trace(rho).real, dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.data))

    def marginal_populations(self, mode: int = 0) -> np.ndarray:
        p = self.populations.reshape(self.dims)
        axes = tuple(i for i in range(len(self.dims)) if i != mode)
        return p.sum(axis=axes) if axes else p

    @property
    def tail_bound(self) -> float:
        return max(float(self.marginal_populations(k)[-1]) for k in range(len(self.dims)))

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


def number_state_density(dim: int, n: int) -> DensityMatrix:
    return DensityMatrix(projector(dim, n).toarray())


def poisson_density(dim: int, mean: float) -> DensityMatrix:
    """Diagonal state with Poisson populations (a phase-averaged coherent state).

    Raises TruncationTooSmall when the Poisson mass beyond ``dim - 1`` exceeds
    ``TOLERANCES.poisson_tail``; otherwise the kept populations are renormalized.
    """
    dim = _check_dim(dim)
    if not mean > 0:
        raise ValueError(f"Poisson mean must be positive, got {mean!r}")
    lost = stats.poisson.sf(dim - 1, mean)
    if lost > TOLERANCES.poisson_tail:
        raise TruncationTooSmall(
            f"Poisson({mean}) leaves mass {lost:.2e} above n={dim - 1}; increase dim")
    p = stats.poisson.pmf(np.arange(dim), mean)
    return DensityMatrix(np.diag(p / p.sum()).astype(complex))


def thermal_density(dim: int, mean: float) -> DensityMatrix:
    """Geometric populations with ratio mean/(mean+1), truncated and renormalized."""
    dim = _check_dim(dim)
    r = mean / (mean + 1.0)
    p = r ** np.arange(dim)
    return DensityMatrix(np.diag(p / p.sum()).astype(complex))


def _as_array(rho):
    if isinstance(rho, DensityMatrix):
        return rho.data
    if sp.issparse(rho):
        return rho.toarray()
    return np.asarray(rho)


def expectation(op, rho) -> complex:
    """Tr(op rho)."""
    r = _as_array(rho)
    if op.shape != r.shape:
        raise DimensionMismatch(f"operator {op.shape} vs state {r.shape}")
    if sp.issparse(op):
        return complex(op.multiply(r.T).sum())
    return complex(np.einsum("ij,ji->", op, r))


def trace_distance(rho, sigma) -> float:
    diff = _as_array(rho) - _as_array(sigma)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def random_density(dim: int, rng=None, support: int | None = None) -> DensityMatrix:
    """Random full-rank state (Ginibre ensemble), optionally confined to n < support."""
    rng = np.random.default_rng(rng)
    k = dim if support is None else support
    g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    rho = np.zeros((dim, dim), complex)
    rho[:k, :k] = g @ g.conj().T
    return DensityMatrix.from_unnormalized(rho)

