"""Gate families: diagonal phases, the two-qubit nonlocal core, transpositions,
Haar-random unitaries and fixed matrices read from text files."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .tensor import is_unitary

FAMILIES = ("diagonal", "nl", "transposition", "haar", "fixed")

# Bell basis columns |Phi+>, |Phi->, |Psi+>, |Psi-> and their (XX, YY, ZZ) eigenvalues
_BELL = np.array(
    [[1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1], [1, -1, 0, 0]], dtype=complex
) / np.sqrt(2)
_BELL_SIGNS = np.array([[1, -1, 1], [-1, 1, 1], [1, 1, -1], [-1, -1, -1]], dtype=float)


def diag_unitary(phis: Sequence[float], dim: int | None = None) -> np.ndarray:
    """Diagonal unitary with phases ``e^{i phi}``.

    With ``dim`` given, the phases fill the last ``len(phis)`` diagonal slots and
    the remaining entries are 1, so ``diag_unitary([phi], 4)`` is
    ``diag(1, 1, 1, e^{i phi})``.
    """
    phis = np.asarray(phis, dtype=float)
    if dim is None:
        dim = len(phis)
    if dim < 2 or dim & (dim - 1) or len(phis) > dim or len(phis) == 0:
        raise ValueError(f"cannot place {len(phis)} phases on a diagonal of dimension {dim}")
    full = np.zeros(dim)
    full[dim - len(phis):] = phis
    return np.diag(np.exp(1j * full))


def diag_phases_batch(phis: np.ndarray, dim: int) -> np.ndarray:
    """Diagonals (not matrices) for a stack of phase vectors, same placement rule."""
    phis = np.asarray(phis, dtype=float)
    k = phis.shape[-1]
    full = np.zeros(phis.shape[:-1] + (dim,))
    full[..., dim - k:] = phis
    return np.exp(1j * full)


def canonical_nl(j1: float, j2: float, j3: float) -> np.ndarray:
    """``exp[-i (j1 XX + j2 YY + j3 ZZ)]`` built in the Bell basis, where all three terms are diagonal."""
    return canonical_nl_batch(np.array([j1, j2, j3], dtype=float))


def canonical_nl_batch(js: np.ndarray) -> np.ndarray:
    js = np.asarray(js, dtype=float)
    phases = np.exp(-1j * (js @ _BELL_SIGNS.T))
    return np.einsum("ib,...b,jb->...ij", _BELL, phases, _BELL.conj())


def transposition_unitary(i: int, j: int, dim: int) -> np.ndarray:
    """Permutation matrix exchanging basis states ``i`` and ``j`` (0-indexed)."""
    if i == j or not (0 <= i < dim and 0 <= j < dim):
        raise ValueError(f"invalid transposition ({i}, {j}) on dimension {dim}")
    p = np.eye(dim, dtype=complex)
    p[[i, j]] = p[[j, i]]
    return p


def haar_random(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix with phase fixing.

    ``seed`` is anything accepted by :func:`numpy.random.default_rng`.
    """
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# --- matrix files -----------------------------------------------------------

def _parse_complex(token: str) -> complex:
    return complex(token.replace("i", "j").replace("I", "j"))


def parse_matrix(text: str) -> np.ndarray:
    """Parse the ``dim N`` header plus ``N*N`` row-major ``a+bi`` tokens."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].lower().startswith("dim"):
        raise ValueError("matrix file must start with a 'dim N' header")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header line {lines[0]!r}")
    dim = int(head[1])
    tokens = " ".join(lines[1:]).split()
    if len(tokens) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, found {len(tokens)}")
    return np.array([_parse_complex(t) for t in tokens], dtype=complex).reshape(dim, dim)


def format_matrix(u: np.ndarray, digits: int = 4) -> str:
    u = np.asarray(u, dtype=complex)
    rows = [f"dim {u.shape[0]}"]
    for row in u:
        rows.append(" ".join(f"{z.real:+.{digits}f}{z.imag:+.{digits}f}i" for z in row))
    return "\n".join(rows) + "\n"


def load_matrix(path: str | Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def save_matrix(path: str | Path, u: np.ndarray, digits: int = 4) -> None:
    Path(path).write_text(format_matrix(u, digits))


def fixture_haar(k: int) -> np.ndarray:
    """One of five stored four-dimensional Haar samples, given to four decimals."""
    if k not in range(1, 6):
        raise ValueError(f"fixture index must be 1..5, got {k}")
    text = resources.files("entpower.data").joinpath(f"haar_u{k}.txt").read_text()
    return parse_matrix(text)


# --- gate specifications ----------------------------------------------------

@dataclass(frozen=True)
class GateSpec:
    """A parameterized gate.

    ``params`` holds phases for ``diagonal`` (placed in the last slots),
    ``(j1, j2, j3)`` for ``nl``, ``(i, j)`` for ``transposition`` and the seed
    for ``haar``. ``fixed`` wraps an explicit ``matrix``.
    """

    family: str
    params: tuple[float, ...] = ()
    dim: int = 4
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown gate family {self.family!r}; choose from {', '.join(FAMILIES)}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.family == "nl" and (self.dim != 4 or len(self.params) != 3):
            raise ValueError("nl gates act on two qubits and take three couplings")
        if self.family == "fixed":
            if self.matrix is None:
                raise ValueError("fixed gate needs a matrix")
            object.__setattr__(self, "dim", int(np.asarray(self.matrix).shape[0]))

    @property
    def n_qubits(self) -> int:
        return int(self.dim).bit_length() - 1

    def with_params(self, params) -> "GateSpec":
        return GateSpec(self.family, tuple(params), self.dim, self.matrix)

    def unitary(self) -> np.ndarray:
        if self.family == "diagonal":
            return diag_unitary(self.params, self.dim)
        if self.family == "nl":
            return canonical_nl(*self.params)
        if self.family == "transposition":
            i, j = (int(round(p)) for p in self.params)
            return transposition_unitary(i, j, self.dim)
        if self.family == "haar":
            return haar_random(self.dim, int(self.params[0]) if self.params else None)
        return np.asarray(self.matrix, dtype=complex)

    def check_unitary(self, tol: float = 1e-10) -> bool:
        return is_unitary(self.unitary(), tol)


def gate_batch(spec: GateSpec, params: np.ndarray) -> np.ndarray:
    """Unitaries of ``spec``'s family for a stack of parameter rows ``(B, k)``."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    if spec.family == "diagonal":
        d = diag_phases_batch(params, spec.dim)
        return d[..., :, None] * np.eye(spec.dim)
    if spec.family == "nl":
        return canonical_nl_batch(params)
    return np.stack([spec.with_params(p).unitary() for p in params])
