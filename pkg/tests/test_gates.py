import numpy as np
import pytest

from entpower.gates import (
    GateSpec,
    canonical_nl,
    diag_unitary,
    fixture_haar,
    format_matrix,
    gate_batch,
    haar_random,
    parse_matrix,
    transposition_unitary,
)
from entpower.tensor import is_unitary

X = np.array([[0, 1], [1, 0]])
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1])


def test_phase_placement():
    np.testing.assert_allclose(np.diag(diag_unitary([np.pi], 4)), [1, 1, 1, -1])
    np.testing.assert_allclose(np.diag(diag_unitary([0.1, 0.2, 0.3, 0.4])), np.exp(1j * np.array([0.1, 0.2, 0.3, 0.4])))
    with pytest.raises(ValueError):
        diag_unitary([0.1] * 5, 4)
    with pytest.raises(ValueError):
        diag_unitary([0.1], 6)


@pytest.mark.parametrize("js", [(0.3, 0.0, 0.0), (0.2, 0.5, 1.1), (0.7, 0.7, 0.7)])
def test_bell_basis_build_matches_matrix_exponential(js):
    from scipy.linalg import expm

    h = js[0] * np.kron(X, X) + js[1] * np.kron(Y, Y) + js[2] * np.kron(Z, Z)
    np.testing.assert_allclose(canonical_nl(*js), expm(-1j * h), atol=1e-12)


def test_equal_coupling_core_is_phase_times_swap_power():
    j = 0.37
    swap = np.eye(4)[[0, 2, 1, 3]]
    from scipy.linalg import expm

    np.testing.assert_allclose(canonical_nl(j, j, j), np.exp(1j * j) * expm(-2j * j * swap), atol=1e-12)


def test_transposition():
    p = transposition_unitary(1, 7, 8)
    assert p[7, 1] == 1 and p[1, 7] == 1 and p[0, 0] == 1
    with pytest.raises(ValueError):
        transposition_unitary(3, 3, 8)


def test_haar_is_unitary_and_seeded():
    a = haar_random(8, 5)
    assert is_unitary(a)
    np.testing.assert_array_equal(a, haar_random(8, 5))
    assert not np.allclose(a, haar_random(8, 6))


def test_haar_phases_are_uniform():
    # the eigenphases of a Haar unitary have zero mean first moment: E[tr U] = 0
    rng = np.random.default_rng(0)
    tr = np.array([np.trace(haar_random(4, rng)) for _ in range(4000)])
    assert abs(tr.mean()) < 0.1
    assert np.mean(abs(tr) ** 2) == pytest.approx(1, abs=0.1)


@pytest.mark.parametrize("k", range(1, 6))
def test_fixtures_are_nearly_unitary(k):
    u = fixture_haar(k)
    assert u.shape == (4, 4)
    assert np.abs(u.conj().T @ u - np.eye(4)).max() < 5e-4


def test_matrix_text_round_trip():
    u = haar_random(4, 1)
    assert np.abs(parse_matrix(format_matrix(u, 8)) - u).max() < 1e-7


def test_gatespec_validation_and_batch():
    with pytest.raises(ValueError):
        GateSpec("spooky")
    with pytest.raises(ValueError):
        GateSpec("nl", (0.1, 0.2))
    spec = GateSpec("nl", (0.1, 0.2, 0.3))
    rows = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]])
    batch = gate_batch(spec, rows)
    np.testing.assert_allclose(batch[1], canonical_nl(0.4, 0.5, 0.6))
    d = GateSpec("diagonal", (1.0,), 8)
    np.testing.assert_allclose(gate_batch(d, [[1.0]])[0], d.unitary())
