import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entpower.tensor import (
    Layout,
    embed,
    hermitian_eigenvalues,
    is_unitary,
    jacobi_eigenvalues,
    kron,
    partial_trace,
    partial_transpose,
)

seeds = st.integers(0, 2**32 - 1)


def random_matrix(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_hermitian(rng, d):
    a = random_matrix(rng, d)
    return (a + a.conj().T) / 2


@given(seeds, st.sampled_from([1, 2, 3]))
def test_partial_transpose_is_an_involution(seed, n):
    rng = np.random.default_rng(seed)
    rho = random_matrix(rng, 2**n)
    for q in range(n):
        once = partial_transpose(rho, q)
        np.testing.assert_allclose(partial_transpose(once, q), rho)
        assert np.isclose(np.trace(once), np.trace(rho))


def test_partial_transpose_of_bell_state():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    pt = partial_transpose(np.outer(psi, psi), 0)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(pt)), [-0.5, 0.5, 0.5, 0.5])


def test_partial_transpose_both_sides_is_full_transpose():
    rho = random_matrix(np.random.default_rng(1), 4)
    np.testing.assert_allclose(partial_transpose(rho, [0, 1]), rho.T)


def test_partial_trace_of_product():
    rng = np.random.default_rng(2)
    a, b, c = (random_hermitian(rng, 2) for _ in range(3))
    a, b, c = (m @ m + np.eye(2) for m in (a, b, c))
    a, b, c = (m / np.trace(m) for m in (a, b, c))
    rho = kron(a, b, c)
    np.testing.assert_allclose(partial_trace(rho, [1], Layout.qubits(3)), b)
    np.testing.assert_allclose(partial_trace(rho, [0, 2], Layout.qubits(3)), kron(a, c))


def test_layout_rejects_bad_index():
    with pytest.raises((IndexError, ValueError)):
        partial_transpose(np.eye(4), 2)
    with pytest.raises(ValueError):
        Layout.for_dim(6)


@settings(max_examples=30)
@given(seeds, st.sampled_from([2, 4, 8]))
def test_jacobi_matches_lapack(seed, d):
    h = random_hermitian(np.random.default_rng(seed), d)
    np.testing.assert_allclose(jacobi_eigenvalues(h), hermitian_eigenvalues(h), atol=1e-10)


def test_eigenvalues_descending_and_reject_non_hermitian():
    h = np.diag([1.0, 3.0, 2.0])
    np.testing.assert_allclose(hermitian_eigenvalues(h), [3, 2, 1])
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))


def test_embed_places_operator_on_target():
    x = np.array([[0, 1], [1, 0]])
    lay = Layout.qubits(3)
    np.testing.assert_allclose(embed(x, 1, lay), kron(np.eye(2), x, np.eye(2)))
    assert is_unitary(embed(x, 2, lay))
