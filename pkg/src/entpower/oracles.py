"""Closed-form entangling powers and spectra for the analytically solvable families.

Expressions are evaluated with complex intermediates as written
(principal square roots), and the final value is checked to be real to
within ``IMAG_TOL``. Where a form carries a sign ambiguity from a
``min[...]`` both branches are evaluated and the smaller is returned.
"""
from __future__ import annotations

import numpy as np

IMAG_TOL = 1e-10


def _real(z) -> float:
    z = complex(z)
    if abs(z.imag) > IMAG_TOL:
        raise ArithmeticError(f"closed form left an imaginary residue {z.imag:.3g}")
    return z.real


def ggm_diag1(phi: float) -> float:
    """GGM power of diag(1, 1, 1, e^{i phi}): min[cos^2(phi/4), sin^2(phi/4)]."""
    return float(min(np.cos(phi / 4) ** 2, np.sin(phi / 4) ** 2))


def neg_diag1(phi: float) -> float:
    w = np.exp(1j * phi)
    s = np.sqrt(w * (1 + w) ** 2)
    val = (4 * abs(-1 + w) + abs(2 * s + 4 * w) + abs(4 * w - 2 * s) - 8) / 16
    return _real(val)


def _diag4_terms(phis):
    p1, p2, p3, p4 = (float(p) for p in phis)
    total = np.exp(1j * (p1 + p2 + p3 + p4))
    a, b = np.exp(1j * (p1 + p4)), np.exp(1j * (p2 + p3))
    return total, a, b, np.sqrt(total * (a + b) ** 2)


def ggm_diag4(*phis: float) -> float:
    """GGM power of diag(e^{i phi_1}, ..., e^{i phi_4}), the smaller square-root branch."""
    total, _, _, root = _diag4_terms(phis)
    vals = [_real(np.exp(-1j * np.angle(total)) * (4 * total - 2 * sgn * root) / 8) for sgn in (1, -1)]
    return min(vals)


def neg_diag4(*phis: float) -> float:
    """Negativity power of a general two-qubit diagonal unitary.

    The bracket carries a trailing ``-4``, which is what makes the
    expression reduce to the one-phase case.
    """
    total, a, b, root = _diag4_terms(phis)
    val = (2 * abs(b - a) + abs(root - 2 * total) + abs(root + 2 * total) - 4) / 8
    return _real(val)


def schmidt_eigs_diag1(theta1: float, theta2: float, phi: float) -> tuple[float, float]:
    """Reduced-state eigenvalues of diag(1,1,1,e^{i phi}) on a product input (any phases)."""
    a = (
        np.cos(4 * (theta1 - theta2))
        + np.cos(4 * (theta1 + theta2))
        - 2 * np.cos(4 * theta1)
        - 2 * np.cos(4 * theta2)
        - 14
    )
    root = np.sqrt(complex(8 * np.sin(2 * theta1) ** 2 * np.sin(2 * theta2) ** 2 * np.cos(phi) - a))
    return _real((4 + root) / 8), _real((4 - root) / 8)


def ggm_unl_equalJ(j: float) -> float:
    """GGM power of the nonlocal core with three equal couplings."""
    return float(min(np.cos(2 * j) ** 2, np.sin(2 * j) ** 2))


def schmidt_eigs_unl(j: float, theta1: float, theta2: float) -> tuple[float, float]:
    """Reduced-state eigenvalues of the equal-coupling core on a product input with equal phases.

    The expression carries no phase dependence and holds only for ``xi1 == xi2``;
    use ``unl_output_amplitudes`` for general inputs.
    """
    e8 = np.exp(8j * j)
    root = np.exp(-4j * j) * np.sqrt((-1 + e8) ** 2 * np.sin(theta1 - theta2) ** 4 + 4 * e8)
    hi, lo = _real(0.5 + root / 4), _real(0.5 - root / 4)
    return max(hi, lo), min(hi, lo)


def unl_output_amplitudes(j: float, theta1: float, theta2: float, xi1: float, xi2: float) -> np.ndarray:
    """Output amplitudes ``(a00, a01, a10, a11)`` of the equal-coupling core on a product input."""
    m, p = np.exp(-1j * j) / 2 - np.exp(3j * j) / 2, np.exp(-1j * j) / 2 + np.exp(3j * j) / 2
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    e1, e2 = np.exp(1j * xi1), np.exp(1j * xi2)
    return np.array(
        [
            np.exp(-1j * j) * c1 * c2,
            m * e1 * s1 * c2 + p * e2 * s2 * c1,
            p * e1 * s1 * c2 + m * e2 * s2 * c1,
            s1 * s2 * np.exp(1j * (xi1 + xi2 - j)),
        ]
    )


def quenched_ggm_diag1_closed(mean: float, sd: float, branch: str = "-") -> float:
    """Gaussian average of cos^2(phi/4) (branch ``+``) or sin^2(phi/4) (branch ``-``)."""
    if sd < 0:
        raise ValueError("sd must be nonnegative")
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    sgn = 1 if branch == "+" else -1
    val = (
        0.25
        * np.exp(-(sd**2) / 8 - 1j * mean / 2)
        * (2 * np.exp((sd**2 + 4j * mean) / 8) + sgn * np.exp(1j * mean) + sgn)
    )
    return _real(val)


def gaussian_average(f, mean: float, sd: float, kinks_every: float = np.pi) -> float:
    """Average of ``f(phi)`` over phi ~ N(mean, sd^2) by adaptive quadrature.

    ``f`` may have kinks at integer multiples of ``kinks_every``; those are
    passed to the integrator as breakpoints.
    """
    from scipy import integrate, stats

    if sd == 0:
        return float(f(mean))
    lo, hi = mean - 12 * sd, mean + 12 * sd
    ks = range(int(np.floor(lo / kinks_every)), int(np.ceil(hi / kinks_every)) + 1)
    kinks = [k * kinks_every for k in ks if lo < k * kinks_every < hi]
    val, _ = integrate.quad(lambda x: f(x) * stats.norm.pdf(x, mean, sd), lo, hi,
                            points=kinks or None, limit=500, epsabs=1e-13, epsrel=1e-12)
    return float(val)


def quenched_ggm_diag1_quadrature(mean: float, sd: float) -> float:
    """Gaussian average of min[cos^2(phi/4), sin^2(phi/4)]; kinks sit at odd multiples of pi."""
    return gaussian_average(ggm_diag1, mean, sd)


def quenched_neg_diag1_quadrature(mean: float, sd: float) -> float:
    return gaussian_average(lambda x: abs(np.sin(x / 2)) / 2, mean, sd, kinks_every=2 * np.pi)


def branch_mass(mean: float, sd: float) -> tuple[float, float]:
    """Gaussian mass where the cos^2 branch (``+``) and the sin^2 branch (``-``) is the minimum."""
    from scipy import stats

    if sd == 0:
        plus = float(np.cos(mean / 4) ** 2 <= np.sin(mean / 4) ** 2)
        return plus, 1 - plus
    # cos^2(phi/4) is the smaller one on [pi, 3 pi] modulo 4 pi
    lo, hi = mean - 12 * sd, mean + 12 * sd
    plus = 0.0
    for k in range(int(np.floor((lo - 3 * np.pi) / (4 * np.pi))), int(np.ceil(hi / (4 * np.pi))) + 1):
        a, b = np.pi + 4 * np.pi * k, 3 * np.pi + 4 * np.pi * k
        plus += stats.norm.cdf(b, mean, sd) - stats.norm.cdf(a, mean, sd)
    return float(plus), float(1 - plus)


def neg_unl_noiseless_adc_pdc(j: float) -> float:
    """Negativity power of the equal-coupling core, unchanged by ADC on qubit 0 or PDC."""
    w = np.exp(4j * j)
    return _real((abs(-1 + w) ** 2 + abs(1 + w) ** 2 + 2 * abs(-1 + np.exp(8j * j)) - 4) / 8)


def neg_unl_dpc(j: float, p: float, both_parties: bool = False) -> float:
    """Negativity of the equal-coupling core on |01> with depolarizing noise on one or both inputs.

    Clamped at zero where the expression leaves its nonvanishing regime.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"noise strength p={p} outside [0, 1]")
    w = np.exp(4j * j)
    if not both_parties:
        s = np.sqrt(2) * np.sqrt(-np.exp(10j * j) * (np.cos(8 * j) * (p - 2) ** 2 + p * (4 - 3 * p) - 4))
        e5 = 2 * np.exp(5j * j) * p
        val = (
            abs((-1 + w) ** 2 * (p - 2))
            + abs((1 + w) ** 2 * (p - 2))
            + abs(e5 + s)
            + abs(e5 - s)
            - 8
        ) / 16
    else:
        v = -((-1 + np.exp(8j * j)) ** 2) * (p - 1) ** 2
        rv = np.sqrt(v)
        val = (
            abs(rv - w * (p - 2) * p)
            + abs(w * (p - 2) * p + rv)
            + abs((w * (p - 1) - 1) * (-p + w + 1))
            + abs((w * (p - 1) + 1) * (p + w - 1))
            - 4
        ) / 8
    return max(0.0, _real(val))


def rho_out_unl(j: float, p: float | None = None) -> np.ndarray:
    """Output of the equal-coupling core on |01><01| after ADC (qubit 0) or PDC; ``p`` is ignored.

    With ``L = (e^{-iJ} + e^{3iJ})/2`` and ``T = (e^{-iJ} - e^{3iJ})/2`` the
    ``|01>, |10>`` block is ``|L|^2, L T*, L* T, |T|^2``.
    """
    big_l = np.exp(-1j * j) / 2 + np.exp(3j * j) / 2
    big_t = np.exp(-1j * j) / 2 - np.exp(3j * j) / 2
    psi = np.array([0, big_l, big_t, 0])
    return np.outer(psi, psi.conj())
