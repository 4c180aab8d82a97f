"""Input-state manifolds: fully separable products and 12:3 biseparable states.

Each qubit factor is ``cos(theta)|0> + sin(theta) e^{i xi}|1>``. The two-qubit
factor of a biseparable state uses hyperspherical coordinates::

    a00 = cos t1
    a01 = sin t1 cos t2 e^{i x1}
    a10 = sin t1 sin t2 cos t3 e^{i x2}
    a11 = sin t1 sin t2 sin t3
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class ProductParams:
    thetas: tuple[float, ...]
    xis: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "xis", tuple(float(x) for x in self.xis))
        if len(self.thetas) != len(self.xis):
            raise ValueError("thetas and xis must have equal length")

    @property
    def n(self) -> int:
        return len(self.thetas)

    def to_vector(self) -> np.ndarray:
        return np.array(self.thetas + self.xis)

    @classmethod
    def from_vector(cls, x, n: int) -> "ProductParams":
        x = np.asarray(x, dtype=float)
        return cls(tuple(x[:n]), tuple(x[n:2 * n]))


@dataclass(frozen=True)
class BisepParams:
    pair_thetas: tuple[float, float, float]
    pair_xis: tuple[float, float]
    theta: float
    xi: float

    def to_vector(self) -> np.ndarray:
        return np.array(self.pair_thetas + self.pair_xis + (self.theta, self.xi), dtype=float)

    @classmethod
    def from_vector(cls, x) -> "BisepParams":
        x = [float(v) for v in x]
        return cls(tuple(x[0:3]), tuple(x[3:5]), x[5], x[6])


def qubit_amplitudes(theta, xi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return np.stack([np.cos(theta) + 0j, np.sin(theta) * np.exp(1j * xi)], axis=-1)


def product_batch(thetas: np.ndarray, xis: np.ndarray) -> np.ndarray:
    """Stack of product states; ``thetas``/``xis`` have shape ``(..., n)``."""
    amps = qubit_amplitudes(thetas, xis)
    out = amps[..., 0, :]
    for k in range(1, amps.shape[-2]):
        out = (out[..., :, None] * amps[..., k, None, :]).reshape(out.shape[:-1] + (-1,))
    return out


def pair_amplitudes(x: np.ndarray) -> np.ndarray:
    """Two-qubit amplitudes from ``(..., 5)`` hyperspherical parameters."""
    t1, t2, t3, x1, x2 = (x[..., i] for i in range(5))
    s1, s2 = np.sin(t1), np.sin(t2)
    return np.stack(
        [
            np.cos(t1) + 0j,
            s1 * np.cos(t2) * np.exp(1j * x1),
            s1 * s2 * np.cos(t3) * np.exp(1j * x2),
            s1 * s2 * np.sin(t3) + 0j,
        ],
        axis=-1,
    )


def bisep_batch(x: np.ndarray) -> np.ndarray:
    """Stack of 12:3 biseparable states from ``(..., 7)`` parameter rows."""
    pair = pair_amplitudes(x[..., :5])
    single = qubit_amplitudes(x[..., 5], x[..., 6])
    return (pair[..., :, None] * single[..., None, :]).reshape(x.shape[:-1] + (8,))


def product_state(p: ProductParams, n: int | None = None) -> np.ndarray:
    if n is not None and p.n != n:
        raise ValueError(f"{p.n} qubit parameter pairs given, {n} requested")
    return product_batch(np.array(p.thetas), np.array(p.xis))


def bisep_state(p: BisepParams) -> np.ndarray:
    return bisep_batch(p.to_vector())


def canonicalize_angles(thetas, xis) -> tuple[np.ndarray, np.ndarray]:
    """Fold angles into ``theta in [0, pi]`` and ``xi in [0, 2pi)`` without changing the state vector."""
    th = np.mod(np.asarray(thetas, dtype=float), TWO_PI)
    xi = np.asarray(xis, dtype=float).copy()
    flip = th > np.pi
    th = np.where(flip, TWO_PI - th, th)
    xi = np.where(flip, xi + np.pi, xi)
    xi = np.mod(xi, TWO_PI)
    # mod can return exactly 2pi for tiny negative inputs
    xi = np.where(xi >= TWO_PI, 0.0, xi)
    return th, xi


def canonicalize(p: ProductParams) -> ProductParams:
    th, xi = canonicalize_angles(p.thetas, p.xis)
    return ProductParams(tuple(th), tuple(xi))


def canonicalize_bisep(p: BisepParams) -> BisepParams:
    """Wrap every biseparable angle into ``[0, 2pi)``; the state is unchanged."""
    x = np.mod(p.to_vector(), TWO_PI)
    x = np.where(x >= TWO_PI, 0.0, x)
    return BisepParams.from_vector(x)
