"""Entanglement quantifiers built from partial transposes and Schmidt spectra.

Qubits are indexed from 0. All ``*_batch`` helpers take stacks of states with
one leading axis and skip input validation; the public single-state functions
validate and delegate to them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from .tensor import Layout, _eigvalsh, hermitian_defect, ket_to_dm, partial_trace, partial_transpose

NEG_EIG_CUTOFF = 1e-12
NORM_TOL = 1e-10
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class Bipartition:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    @classmethod
    def of(cls, side_a: Iterable[int], n: int) -> "Bipartition":
        a = tuple(sorted(set(int(i) for i in side_a)))
        return cls(a, tuple(i for i in range(n) if i not in a))

    def validate(self, n: int) -> None:
        a, b = set(self.side_a), set(self.side_b)
        if not a or not b or a & b or a | b != set(range(n)):
            raise ValueError(f"invalid bipartition {self.side_a}|{self.side_b} of {n} qubits")


@lru_cache(maxsize=None)
def all_cuts(n: int) -> tuple[tuple[int, ...], ...]:
    """One representative side per unordered bipartition: 2**(n-1) - 1 cuts."""
    cuts = []
    for k in range(1, n // 2 + 1):
        for side in combinations(range(n), k):
            # for even splits keep only the half containing qubit 0
            if 2 * k == n and 0 not in side:
                continue
            cuts.append(side)
    return tuple(cuts)


def _layout(dim: int, layout: Layout | None) -> Layout:
    if layout is None:
        return Layout.for_dim(dim)
    if layout.total_dim != dim:
        raise ValueError(f"layout dimension {layout.total_dim} does not match state dimension {dim}")
    return layout


def _check_state(rho: np.ndarray) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("expected a square density matrix")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise ValueError(f"density matrix trace {np.trace(rho).real:.12g} is not 1")
    if hermitian_defect(rho) > 1e-10:
        raise ValueError("density matrix is not Hermitian")


def _check_pure(psi: np.ndarray) -> None:
    if psi.ndim != 1:
        raise ValueError("expected a pure state vector; GGM is defined for pure states only")
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
        raise ValueError(f"state vector norm {np.linalg.norm(psi):.12g} is not 1")


# --- negativity -----------------------------------------------------------

def negativity_batch(rho: np.ndarray, transposed: Iterable[int], layout: Layout) -> np.ndarray:
    """Sum of |negative eigenvalues| of the partial transpose over ``transposed``."""
    ev = _eigvalsh(partial_transpose(rho, list(transposed), layout))
    return -np.sum(np.where(ev < -NEG_EIG_CUTOFF, ev, 0.0), axis=-1)


def negativity(rho: np.ndarray, cut: Bipartition | None = None, layout: Layout | None = None) -> float:
    """Negativity of ``rho`` across ``cut`` (default: qubit 0 versus the rest).

    Eigenvalues in ``[-1e-12, 0]`` are treated as zero.
    """
    rho = np.asarray(rho, dtype=complex)
    _check_state(rho)
    layout = _layout(rho.shape[-1], layout)
    cut = cut or Bipartition.of([0], layout.n)
    cut.validate(layout.n)
    return float(negativity_batch(rho, cut.side_b, layout))


# --- Schmidt spectra and GGM ----------------------------------------------

def _reduced_on_side(psi: np.ndarray, side: tuple[int, ...], n: int) -> np.ndarray:
    """Reduced density matrix on the smaller of ``side`` and its complement."""
    rest = tuple(i for i in range(n) if i not in side)
    small, big = (side, rest) if len(side) <= len(rest) else (rest, side)
    batch = psi.shape[:-1]
    nb = len(batch)
    t = psi.reshape(batch + (2,) * n)
    t = t.transpose(tuple(range(nb)) + tuple(nb + i for i in small) + tuple(nb + i for i in big))
    m = t.reshape(batch + (2 ** len(small), 2 ** len(big)))
    return m @ np.conj(np.swapaxes(m, -1, -2))


def max_schmidt_batch(psi: np.ndarray, n: int) -> np.ndarray:
    """Largest Schmidt eigenvalue over all bipartitions, for a stack of pure states."""
    if n == 2:
        det = psi[..., 0] * psi[..., 3] - psi[..., 1] * psi[..., 2]
        norm = np.sum(np.abs(psi) ** 2, axis=-1)
        return 0.5 * (norm + np.sqrt(np.maximum(norm**2 - 4 * np.abs(det) ** 2, 0.0)))
    best = np.zeros(psi.shape[:-1])
    for side in all_cuts(n):
        red = _reduced_on_side(psi, side, n)
        if red.shape[-1] == 2:
            a, d = red[..., 0, 0].real, red[..., 1, 1].real
            b2 = np.abs(red[..., 0, 1]) ** 2
            top = 0.5 * (a + d + np.sqrt((a - d) ** 2 + 4 * b2))
        else:
            top = _eigvalsh(red)[..., -1]
        best = np.maximum(best, top)
    return best


def ggm_batch(psi: np.ndarray, n: int) -> np.ndarray:
    return 1.0 - max_schmidt_batch(psi, n)


def ggm(psi: np.ndarray, layout: Layout | None = None) -> float:
    """Generalized geometric measure of a pure multi-qubit state.

    One minus the largest Schmidt eigenvalue over all ``2**(n-1) - 1``
    bipartitions. Lies in ``[0, 1/2]`` for qubits.
    """
    psi = np.asarray(psi, dtype=complex)
    _check_pure(psi)
    layout = _layout(psi.shape[-1], layout)
    return float(ggm_batch(psi, layout.n))


def schmidt_eigenvalues(psi: np.ndarray, cut: Bipartition, layout: Layout | None = None) -> np.ndarray:
    """Eigenvalues of the reduced state on the smaller side of ``cut``, descending."""
    psi = np.asarray(psi, dtype=complex)
    _check_pure(psi)
    layout = _layout(psi.shape[-1], layout)
    cut.validate(layout.n)
    red = _reduced_on_side(psi, cut.side_a, layout.n)
    return np.clip(_eigvalsh(red)[::-1], 0.0, None)


# --- monogamy score -------------------------------------------------------

def monogamy_score_batch(rho: np.ndarray, nodal: int, layout: Layout) -> np.ndarray:
    score = negativity_batch(rho, [nodal], layout) ** 2
    pair = Layout.qubits(2)
    for i in range(layout.n):
        if i == nodal:
            continue
        red = partial_trace(rho, [nodal, i], layout)
        score = score - negativity_batch(red, [1], pair) ** 2
    return score


def monogamy_score_neg_sq(rho: np.ndarray, nodal: int = 1, layout: Layout | None = None) -> float:
    """Squared-negativity monogamy score with ``nodal`` as the observer.

    ``N^2(nodal : rest) - sum_i N^2(rho_{nodal,i})``; the default nodal qubit
    is index 1 (the second qubit).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = ket_to_dm(rho)
    _check_state(rho)
    layout = _layout(rho.shape[-1], layout)
    if layout.n < 3:
        raise ValueError("monogamy score needs at least three qubits")
    layout.check(nodal)
    return float(monogamy_score_batch(rho, nodal, layout))
