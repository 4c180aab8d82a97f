"""Single-qubit Kraus channels and their local action on multi-qubit states."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor import Layout, dagger, embed

KINDS = ("ADC", "PDC", "DPC", "Identity")

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kind(kind: str) -> str:
    for k in KINDS:
        if kind.upper() == k.upper():
            return k
    raise ValueError(f"unknown channel {kind!r}; choose from {', '.join(KINDS)}")


def kraus_set(kind: str, p: float) -> list[np.ndarray]:
    """Kraus operators of the amplitude-damping, phase-damping or depolarizing channel.

    PDC uses ``sqrt(1 - p/2) I`` and ``sqrt(p/2) Z``; DPC uses
    ``sqrt(1 - 3p/4) I`` and ``sqrt(p/4)`` times each Pauli, so at ``p = 1`` it
    is the fully depolarizing map.
    """
    kind = _kind(kind)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength p={p} outside [0, 1]")
    if kind == "ADC":
        return [
            np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
            np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex),
        ]
    if kind == "PDC":
        return [np.sqrt(1 - p / 2) * _I, np.sqrt(p / 2) * _Z]
    if kind == "DPC":
        return [np.sqrt(1 - 3 * p / 4) * _I] + [np.sqrt(p / 4) * s for s in (_X, _Y, _Z)]
    return [_I.copy()]


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    p: float
    target: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", _kind(self.kind))
        object.__setattr__(self, "p", float(self.p))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise strength p={self.p} outside [0, 1]")
        if int(self.target) < 0:
            raise ValueError(f"negative channel target {self.target}")
        object.__setattr__(self, "target", int(self.target))

    def kraus(self) -> list[np.ndarray]:
        return kraus_set(self.kind, self.p)


def on_qubits(kind: str, p: float | Sequence[float], targets: Sequence[int]) -> list[ChannelSpec]:
    """Same channel on several qubits; ``p`` may be one value or one per target."""
    ps = [p] * len(targets) if np.isscalar(p) else list(p)
    if len(ps) != len(targets):
        raise ValueError("one noise strength per target expected")
    return [ChannelSpec(kind, q, t) for q, t in zip(ps, targets)]


def apply_kraus(rho: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros_like(rho, dtype=complex)
    for k in ops:
        out = out + k @ rho @ dagger(k)
    return out


def apply_local(rho: np.ndarray, spec: ChannelSpec, layout: Layout | None = None) -> np.ndarray:
    """Apply ``spec`` to its target qubit of ``rho`` (stacks of states allowed)."""
    rho = np.asarray(rho, dtype=complex)
    layout = layout or Layout.for_dim(rho.shape[-1])
    layout.check(spec.target)
    if spec.kind == "Identity" or spec.p == 0.0:
        return rho.copy()
    return apply_kraus(rho, [embed(k, spec.target, layout) for k in spec.kraus()])


def apply_all(rho: np.ndarray, specs: Sequence[ChannelSpec], layout: Layout | None = None) -> np.ndarray:
    """Apply channels left to right; repeated targets compose."""
    rho = np.asarray(rho, dtype=complex)
    layout = layout or Layout.for_dim(rho.shape[-1])
    for s in specs:
        layout.check(s.target)
    out = rho.copy()
    for s in specs:
        out = apply_local(out, s, layout)
    return out


def single_qubit_map(specs: Sequence[ChannelSpec], target: int):
    """Compose every channel acting on ``target`` into one list of 2x2 Kraus operators."""
    ops = [_I.copy()]
    for s in specs:
        if s.target == target and s.kind != "Identity" and s.p > 0:
            ops = [k @ o for o in ops for k in s.kraus()]
    return ops
