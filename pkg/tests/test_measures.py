import numpy as np
import pytest
from hypothesis import given, strategies as st

from entpower.gates import diag_unitary, haar_random
from entpower.measures import Bipartition, all_cuts, ggm, monogamy_score_neg_sq, negativity, schmidt_eigenvalues
from entpower.oracles import schmidt_eigs_diag1
from entpower.states import ProductParams, product_state
from entpower.tensor import kron

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
GHZ = np.array([1, 0, 0, 0, 0, 0, 0, 1]) / np.sqrt(2)
W = np.array([0, 1, 1, 0, 1, 0, 0, 0]) / np.sqrt(3)


def dm(psi):
    return np.outer(psi, psi.conj())


def test_reference_values():
    assert negativity(dm(BELL)) == pytest.approx(0.5)
    assert negativity(dm(np.array([1, 0, 0, 0]))) == 0.0
    assert ggm(BELL) == pytest.approx(0.5)
    assert ggm(GHZ) == pytest.approx(0.5)
    assert ggm(W) == pytest.approx(1 / 3)
    assert ggm(product_state(ProductParams((0.3, 1.1, 2.0), (0.1, 0.2, 0.3)))) == pytest.approx(0, abs=1e-12)


def test_werner_negativity():
    # p |Bell><Bell| + (1-p) I/4 is entangled for p > 1/3, N = (3p - 1)/4
    for p in (0.2, 0.5, 0.9):
        rho = p * dm(BELL) + (1 - p) * np.eye(4) / 4
        assert negativity(rho) == pytest.approx(max(0.0, (3 * p - 1) / 4), abs=1e-12)


def test_cuts_enumerated_once():
    assert len(all_cuts(3)) == 3
    assert len(all_cuts(5)) == 15


def test_monogamy_score_ghz():
    # GHZ pairs are separable, the nodal cut carries N = 1/2
    assert monogamy_score_neg_sq(GHZ) == pytest.approx(0.25)
    assert monogamy_score_neg_sq(dm(GHZ), nodal=0) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        monogamy_score_neg_sq(dm(BELL))


@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi /= np.linalg.norm(psi)
    local = kron(*(haar_random(2, rng) for _ in range(3)))
    phi = local @ psi
    assert ggm(phi) == pytest.approx(ggm(psi), abs=1e-10)
    assert negativity(dm(phi)) == pytest.approx(negativity(dm(psi)), abs=1e-10)
    assert monogamy_score_neg_sq(phi) == pytest.approx(monogamy_score_neg_sq(psi), abs=1e-10)


def test_ggm_rejects_mixed_or_unnormalized():
    with pytest.raises(ValueError):
        ggm(dm(BELL))
    with pytest.raises(ValueError):
        ggm(2 * BELL)


def test_negativity_rejects_bad_state():
    with pytest.raises(ValueError):
        negativity(2 * dm(BELL))
    with pytest.raises(ValueError):
        negativity(np.array([[0.5, 1], [0, 0.5]]))


def test_schmidt_spectrum_matches_closed_form():
    u = diag_unitary([np.pi / 2], 4)
    for t1, t2, x1, x2 in [(np.pi / 4, np.pi / 4, 0, 0), (0.3, 1.2, 0.4, 2.0), (2.0, 0.7, 5.0, 1.0)]:
        psi = u @ product_state(ProductParams((t1, t2), (x1, x2)))
        np.testing.assert_allclose(schmidt_eigenvalues(psi, Bipartition.of([0], 2)),
                                   schmidt_eigs_diag1(t1, t2, np.pi / 2), atol=1e-12)
