import numpy as np
import pytest
from hypothesis import given, strategies as st

from entpower.channels import ChannelSpec, apply_all, apply_local, kraus_set, on_qubits, single_qubit_map
from entpower.tensor import Layout

kinds = st.sampled_from(["ADC", "PDC", "DPC", "Identity"])
probs = st.floats(0, 1)


@given(kinds, probs)
def test_trace_preserving(kind, p):
    ops = kraus_set(kind, p)
    np.testing.assert_allclose(sum(k.conj().T @ k for k in ops), np.eye(2), atol=1e-12)


@given(kinds, probs, st.integers(0, 2**32 - 1))
def test_completely_positive(kind, p, seed):
    # the Choi matrix of every channel is positive semidefinite
    ops = kraus_set(kind, p)
    choi = sum(np.outer(k.reshape(-1), k.reshape(-1).conj()) for k in ops)
    assert np.linalg.eigvalsh(choi).min() > -1e-12
    # and extended to a second qubit it keeps a random state positive
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    out = apply_local(rho, ChannelSpec(kind, p, 1))
    assert np.linalg.eigvalsh(out).min() > -1e-12
    assert np.trace(out).real == pytest.approx(1)


def test_known_actions():
    one = np.diag([0.0, 1.0]).astype(complex)
    np.testing.assert_allclose(apply_local(one, ChannelSpec("ADC", 1.0, 0)), np.diag([1, 0]), atol=1e-15)
    plus = np.full((2, 2), 0.5, dtype=complex)
    np.testing.assert_allclose(apply_local(plus, ChannelSpec("PDC", 1.0, 0)), np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(apply_local(plus, ChannelSpec("DPC", 1.0, 0)), np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(apply_local(plus, ChannelSpec("PDC", 0.4, 0))[0, 1], 0.5 * 0.6)


def test_local_action_on_three_qubits():
    rho = np.zeros((8, 8), dtype=complex)
    rho[7, 7] = 1  # |111>
    out = apply_all(rho, on_qubits("ADC", 1.0, [2]), Layout.qubits(3))
    assert out[6, 6] == pytest.approx(1)  # |110>


def test_composed_map_matches_sequential():
    specs = [ChannelSpec("ADC", 0.3, 0), ChannelSpec("DPC", 0.4, 0), ChannelSpec("PDC", 0.2, 1)]
    ops = single_qubit_map(specs, 0)
    rng = np.random.default_rng(3)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rho = a @ a.conj().T / np.trace(a @ a.conj().T)
    seq = apply_all(rho, specs[:2], Layout.qubits(1))
    np.testing.assert_allclose(sum(k @ rho @ k.conj().T for k in ops), seq, atol=1e-14)


def test_validation():
    with pytest.raises(ValueError):
        kraus_set("ADC", 1.2)
    with pytest.raises(ValueError):
        ChannelSpec("bitflip", 0.1)
    with pytest.raises((ValueError, IndexError)):
        apply_all(np.eye(4) / 4, [ChannelSpec("PDC", 0.1, 2)])
    with pytest.raises(ValueError):
        on_qubits("PDC", [0.1, 0.2], [0])
