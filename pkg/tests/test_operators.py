import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from atomlaser.errors import DimensionMismatch, InvalidDimension, InvalidState, TruncationTooSmall
from atomlaser.operators import (DensityMatrix, annihilation, creation, embed, excitation_number,
                                 expectation, identity, jc_hamiltonian, number,
                                 number_state_density, poisson_density, projector, random_density,
                                 sg_lowering, thermal_density, trace_distance)

dims = st.integers(min_value=2, max_value=25)


@given(dims)
def test_annihilation_matrix_elements(d):
    a = annihilation(d).toarray()
    for n in range(1, d):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))
    assert np.count_nonzero(a) == d - 1


@given(dims)
def test_commutator_is_identity_except_top(d):
    a = annihilation(d)
    comm = (a @ creation(d) - creation(d) @ a).toarray()
    expected = np.eye(d)
    expected[-1, -1] = -(d - 1)
    assert np.allclose(comm, expected)


@given(dims)
def test_number_and_sg(d):
    assert np.allclose(number(d).diagonal(), np.arange(d))
    e = sg_lowering(d).toarray()
    assert np.allclose(e, np.eye(d, k=1))
    assert np.allclose((creation(d) @ annihilation(d)).toarray(), number(d).toarray())


def test_invalid_dimension():
    with pytest.raises(InvalidDimension):
        annihilation(0)
    with pytest.raises(InvalidDimension):
        projector(3, 3)


def test_embed_matches_kron(rng):
    op = rng.normal(size=(3, 3))
    full = embed(op, (2, 3, 4), 1).toarray()
    assert np.allclose(full, np.kron(np.kron(np.eye(2), op), np.eye(4)))
    assert np.allclose(embed(op, (3,), 0).toarray(), op)


def test_jc_hamiltonian_hermitian_and_conserves_excitations():
    h = jc_hamiltonian(6, 0.7)
    assert abs(h - h.conj().T).max() < 1e-14
    n_ex = excitation_number(6)
    assert abs(h @ n_ex - n_ex @ h).max() < 1e-14


def test_density_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.eye(4) / 4, dims=(3,))


def test_density_is_read_only():
    rho = number_state_density(3, 1)
    with pytest.raises(ValueError):
        rho.data[0, 0] = 1


@given(st.floats(min_value=0.1, max_value=20.0))
def test_poisson_density_against_factorial_formula(mean):
    d = int(mean + 12 * math.sqrt(mean) + 25)
    p = poisson_density(d, mean).populations
    oracle = np.array([math.exp(-mean) * mean ** n / math.factorial(n) for n in range(d)])
    assert np.allclose(p, oracle / oracle.sum(), rtol=1e-10, atol=1e-300)


def test_poisson_truncation_guard():
    with pytest.raises(TruncationTooSmall):
        poisson_density(10, 8.0)


def test_thermal_ratio():
    p = thermal_density(30, 3.0).populations
    assert np.allclose(p[1:] / p[:-1], 0.75)


def test_marginals_and_tail():
    pa = np.array([0.7, 0.2, 0.1])
    pb = np.array([0.9, 0.1])
    rho = DensityMatrix(np.diag(np.kron(pa, pb)).astype(complex), dims=(3, 2))
    assert np.allclose(rho.marginal_populations(0), pa)
    assert np.allclose(rho.marginal_populations(1), pb)
    assert rho.tail_bound == pytest.approx(0.1)


def test_expectation(rng):
    rho = random_density(5, rng)
    n = number(5)
    assert expectation(n, rho) == pytest.approx(np.trace(n.toarray() @ rho.data))
    assert expectation(identity(5), rho) == pytest.approx(1.0)
    with pytest.raises(DimensionMismatch):
        expectation(number(4), rho)


def test_trace_distance_of_diagonal_states_is_half_l1():
    p = np.array([0.5, 0.3, 0.2])
    q = np.array([0.2, 0.2, 0.6])
    assert trace_distance(np.diag(p), np.diag(q)) == pytest.approx(0.5 * np.abs(p - q).sum())


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 8))
def test_trace_distance_metric_properties(seed, d):
    r = np.random.default_rng(seed)
    x, y, z = (random_density(d, r) for _ in range(3))
    dxy = trace_distance(x, y)
    assert 0 <= dxy <= 1 + 1e-12
    assert dxy == pytest.approx(trace_distance(y, x))
    assert dxy <= trace_distance(x, z) + trace_distance(z, y) + 1e-12
    assert trace_distance(x, x) < 1e-12


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 10))
def test_random_density_support(seed, support):
    rho = random_density(12, np.random.default_rng(seed), support=support)
    assert np.abs(rho.data[support:, :]).max() == 0
    assert rho.purity <= 1 + 1e-12


def test_sparse_outputs():
    assert sp.issparse(annihilation(4)) and sp.issparse(jc_hamiltonian(3, 1.0))
