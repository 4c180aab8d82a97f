"""Batched multi-start Nelder-Mead.

Many independent problems advance in lockstep so each simplex step costs one
vectorized objective call. Every problem row keeps its own simplex and stops
on its own criterion, so a row's trajectory does not depend on which other
rows share the batch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# f(x, rows) -> values to minimize; x is (k, n), rows are problem indices (k,)
BatchObjective = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 50
    max_iters: int = 2000
    ftol: float = 1e-9
    xtol: float = 1e-7
    seed: int = 0
    step: float = 0.4
    polish_step: float = 0.05

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


def nelder_mead_batch(
    f: BatchObjective,
    x0: np.ndarray,
    step: float,
    ftol: float,
    xtol: float,
    max_iters: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimize ``f`` from each row of ``x0`` (shape ``(B, n)``).

    Uses the dimension-adaptive coefficients of Gao and Han. A row stops once
    its simplex spread is below ``ftol`` in value and ``xtol`` in every
    coordinate, or after ``max_iters`` iterations.

    Returns
    -------
    x, fx, iters : best vertex, its value and the iteration count per row.
    """
    x0 = np.asarray(x0, dtype=float)
    nrow, n = x0.shape
    alpha, gamma = 1.0, 1.0 + 2.0 / n
    rho, sigma = 0.75 - 0.5 / n, 1.0 - 1.0 / n

    simplex = np.repeat(x0[:, None, :], n + 1, axis=1)
    simplex[:, 1:, :] += step * np.eye(n)
    allrows = np.arange(nrow)
    fs = f(simplex.reshape(-1, n), np.repeat(allrows, n + 1)).reshape(nrow, n + 1)
    iters = np.zeros(nrow, dtype=int)
    active = np.ones(nrow, dtype=bool)

    while True:
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        S, F = simplex[idx], fs[idx]
        order = np.argsort(F, axis=1, kind="stable")
        S = np.take_along_axis(S, order[:, :, None], axis=1)
        F = np.take_along_axis(F, order, axis=1)

        done = (F[:, -1] - F[:, 0] <= ftol) & (np.max(np.abs(S[:, 1:] - S[:, :1]), axis=(1, 2)) <= xtol)
        done |= iters[idx] >= max_iters
        simplex[idx], fs[idx] = S, F
        active[idx[done]] = False
        keep = ~done
        idx, S, F = idx[keep], S[keep], F[keep]
        if idx.size == 0:
            break
        iters[idx] += 1

        c = S[:, :-1].mean(axis=1)
        worst = S[:, -1]
        xr = c + alpha * (c - worst)
        fr = f(xr, idx)
        new_x, new_f = xr.copy(), fr.copy()

        f0, fsec, fw = F[:, 0], F[:, -2], F[:, -1]
        expand = fr < f0
        outside = (fr >= fsec) & (fr < fw)
        inside = fr >= fw
        shrink = np.zeros(idx.size, dtype=bool)

        if expand.any():
            xe = c[expand] + gamma * (xr[expand] - c[expand])
            fe = f(xe, idx[expand])
            better = fe < fr[expand]
            sel = np.nonzero(expand)[0][better]
            new_x[sel], new_f[sel] = xe[better], fe[better]
        if outside.any():
            xc = c[outside] + rho * (xr[outside] - c[outside])
            fc = f(xc, idx[outside])
            ok = fc <= fr[outside]
            pos = np.nonzero(outside)[0]
            new_x[pos[ok]], new_f[pos[ok]] = xc[ok], fc[ok]
            shrink[pos[~ok]] = True
        if inside.any():
            xcc = c[inside] + rho * (worst[inside] - c[inside])
            fcc = f(xcc, idx[inside])
            ok = fcc < fw[inside]
            pos = np.nonzero(inside)[0]
            new_x[pos[ok]], new_f[pos[ok]] = xcc[ok], fcc[ok]
            shrink[pos[~ok]] = True

        accept = ~shrink
        S[accept, -1] = new_x[accept]
        F[accept, -1] = new_f[accept]
        if shrink.any():
            best = S[shrink, :1]
            moved = best + sigma * (S[shrink, 1:] - best)
            k = moved.shape[0]
            fm = f(moved.reshape(-1, n), np.repeat(idx[shrink], n)).reshape(k, n)
            S[shrink, 1:] = moved
            F[shrink, 1:] = fm
        simplex[idx], fs[idx] = S, F

    best = np.argmin(fs, axis=1)
    return simplex[allrows, best], fs[allrows, best], iters


def problem_rng(seed: int, key: int) -> np.random.Generator:
    """Independent stream for problem ``key`` under a master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(key)]))


def multistart_maximize(
    f: BatchObjective,
    keys: Sequence[int],
    lower: np.ndarray,
    upper: np.ndarray,
    cfg: OptimizerConfig,
    extra_starts: np.ndarray | None = None,
) -> dict:
    """Maximize ``f`` for each problem ``keys[i]`` (row ``i`` of the objective).

    Restart points are uniform in the box ``[lower, upper]``, drawn from the
    stream of ``(cfg.seed, key)`` so that restart ``r`` of a problem is the
    same point whatever the total restart count. Each restart is run twice:
    a wide simplex, then a fresh small one from its result. ``extra_starts``
    (shape ``(P, m, n)``) adds deterministic starting points.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    keys = np.asarray(keys)
    P, n, R = len(keys), lower.size, cfg.restarts
    starts = np.empty((P, R, n))
    for i, key in enumerate(keys):
        starts[i] = problem_rng(cfg.seed, key).uniform(lower, upper, size=(R, n))
    if extra_starts is not None:
        starts = np.concatenate([starts, np.asarray(extra_starts, dtype=float)], axis=1)
    m = starts.shape[1]
    owner = np.repeat(np.arange(P), m)

    def g(x, rows):
        return -f(x, owner[rows])

    x, fx, it1 = nelder_mead_batch(g, starts.reshape(-1, n), cfg.step, cfg.ftol, cfg.xtol, cfg.max_iters)
    x, fx, it2 = nelder_mead_batch(g, x, cfg.polish_step, cfg.ftol, cfg.xtol, cfg.max_iters)
    vals = (-fx).reshape(P, m)
    xs = x.reshape(P, m, n)
    best = np.argmax(vals, axis=1)
    return {
        "value": vals[np.arange(P), best],
        "x": xs[np.arange(P), best],
        "restart_values": vals,
        "iterations": (it1 + it2).reshape(P, m),
    }
