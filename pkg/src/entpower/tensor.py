"""Dense complex linear algebra on small multi-qubit operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Most routines
accept a stack of matrices with arbitrary leading batch axes, which is how the
optimizer evaluates many candidate inputs at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class Layout:
    """Ordered local dimensions of a composite system."""

    local_dims: tuple[int, ...]

    def __post_init__(self):
        if not self.local_dims or any(int(d) < 1 for d in self.local_dims):
            raise ValueError(f"invalid local dimensions {self.local_dims!r}")
        object.__setattr__(self, "local_dims", tuple(int(d) for d in self.local_dims))

    @classmethod
    def qubits(cls, n: int) -> "Layout":
        return cls((2,) * int(n))

    @classmethod
    def for_dim(cls, dim: int) -> "Layout":
        n = int(dim).bit_length() - 1
        if n < 1 or 2**n != dim:
            raise ValueError(f"dimension {dim} is not a power of two")
        return cls.qubits(n)

    @property
    def n(self) -> int:
        return len(self.local_dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.local_dims))

    def check(self, index: int) -> int:
        if not 0 <= index < self.n:
            raise IndexError(f"subsystem {index} out of range for {self.n} subsystems")
        return index


def _layout_for(mat: np.ndarray, layout: Layout | None) -> Layout:
    dim = mat.shape[-1]
    if layout is None:
        return Layout.for_dim(dim)
    if layout.total_dim != dim:
        raise ValueError(f"layout dimension {layout.total_dim} does not match matrix dimension {dim}")
    return layout


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more matrices (or vectors)."""
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    """``|psi><psi|`` for a single vector or a stack of vectors."""
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * np.conj(psi[..., None, :])


def partial_transpose(rho: np.ndarray, subsystem: int | Iterable[int], layout: Layout | None = None) -> np.ndarray:
    """Transpose the given subsystem(s) of ``rho``.

    ``rho`` may carry leading batch axes; ``layout`` defaults to qubits.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-1] != rho.shape[-2]:
        raise ValueError("partial transpose needs a square matrix")
    layout = _layout_for(rho, layout)
    subs = [subsystem] if np.isscalar(subsystem) else list(subsystem)
    for s in subs:
        layout.check(int(s))
    n = layout.n
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + layout.local_dims * 2)
    axes = list(range(nb + 2 * n))
    for s in subs:
        r, c = nb + s, nb + n + s
        axes[r], axes[c] = axes[c], axes[r]
    return t.transpose(axes).reshape(rho.shape)


def partial_trace(rho: np.ndarray, keep: Iterable[int], layout: Layout | None = None) -> np.ndarray:
    """Trace out every subsystem not in ``keep``; kept order follows ``sorted(keep)``."""
    rho = np.asarray(rho, dtype=complex)
    layout = _layout_for(rho, layout)
    keep = sorted({layout.check(int(k)) for k in keep})
    if not keep:
        raise ValueError("keep set must be nonempty")
    n = layout.n
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + layout.local_dims * 2)
    # einsum subscripts: batch letters, then row/col letters; traced pairs share a letter
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    bl = [next(letters) for _ in range(nb)]
    rows = [next(letters) for _ in range(n)]
    cols = [rows[i] if i not in keep else next(letters) for i in range(n)]
    out = bl + [rows[i] for i in keep] + [cols[i] for i in keep]
    spec = "".join(bl + rows + cols) + "->" + "".join(out)
    dk = int(np.prod([layout.local_dims[i] for i in keep]))
    return np.einsum(spec, t).reshape(batch + (dk, dk))


def hermitian_defect(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def hermitian_eigenvalues(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix (or stack), sorted descending.

    Raises ``ValueError`` when ``max|a - a^dagger|`` exceeds ``tol``. The input
    is symmetrized before the LAPACK call to absorb roundoff.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError("eigenvalues need a square matrix")
    defect = hermitian_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (max |a - a^dagger| = {defect:.3g})")
    return _eigvalsh(a)[..., ::-1]


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian part; no validation."""
    return np.linalg.eigvalsh(0.5 * (a + dagger(a)))


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic complex Jacobi eigenvalues of one Hermitian matrix, descending.

    Slow reference routine kept independent of LAPACK; used as a cross-check.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # reduce the 2x2 Hermitian block [[app, apq], [conj(apq), aqq]]
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2 * abs(apq), aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s * phase
                rot[q, p] = -s * np.conj(phase)
                a = rot.conj().T @ a @ rot
    return np.sort(np.diag(a).real)[::-1]


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("is_unitary needs a square matrix")
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def embed(op: np.ndarray, target: int, layout: Layout) -> np.ndarray:
    """Lift a local operator on ``target`` to the full space (identity elsewhere)."""
    layout.check(target)
    factors: Sequence[np.ndarray] = [
        op if i == target else np.eye(d, dtype=complex) for i, d in enumerate(layout.local_dims)
    ]
    return kron(*factors)
