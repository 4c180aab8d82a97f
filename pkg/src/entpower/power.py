"""Entangling power: ideal, quench-averaged over Gaussian gate disorder, and
with local noise on the inputs; plus the input-mismatch error and the random
gate survey.

Everything batches over "problems" (a gate realization paired with an input
parameter row) so that the optimizer and the measures run vectorized. Work
that fans out over realizations or gates is cut into fixed-size chunks keyed
by a global index; ``jobs`` only decides how many chunks run at once, so the
results are bitwise identical for any worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import ChannelSpec, single_qubit_map
from .gates import GateSpec, canonical_nl_batch, gate_batch
from .measures import ggm_batch, monogamy_score_batch, negativity_batch
from .optimize import OptimizerConfig, multistart_maximize, problem_rng
from .states import (
    BisepParams,
    ProductParams,
    bisep_batch,
    canonicalize,
    canonicalize_bisep,
    pair_amplitudes,
    product_batch,
    qubit_amplitudes,
)
from .tensor import Layout, dagger, embed, ket_to_dm

CHUNK = 128
# below this the reference gate of a reused-input quench counts as non-entangling
REFERENCE_FLOOR = 1e-9
INPUT_SETS = ("FS", "BS")


@dataclass(frozen=True)
class Measure:
    """Which entanglement quantifier a power maximizes.

    ``kind`` is ``ggm``, ``negativity`` (across ``side`` versus the rest,
    default qubit 0) or ``monogamy`` (squared-negativity score at ``nodal``).
    """

    kind: str
    nodal: int = 1
    side: tuple[int, ...] = (0,)

    def __post_init__(self):
        kinds = ("ggm", "negativity", "monogamy")
        k = self.kind.lower()
        aliases = {"neg": "negativity", "n": "negativity", "g": "ggm", "mono": "monogamy", "delta": "monogamy"}
        k = aliases.get(k, k)
        if k not in kinds:
            raise ValueError(f"unknown measure {self.kind!r}; choose from {', '.join(kinds)}")
        object.__setattr__(self, "kind", k)
        object.__setattr__(self, "side", tuple(int(s) for s in self.side))

    @property
    def tag(self) -> str:
        if self.kind == "monogamy":
            return f"monogamy(nodal={self.nodal})"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "Measure":
        """``ggm``, ``negativity`` or ``monogamy[:nodal]``."""
        name, _, arg = text.partition(":")
        if arg:
            return cls(name, nodal=int(arg))
        return cls(name)


GGM = Measure("ggm")
NEGATIVITY = Measure("negativity")


def monogamy(nodal: int = 1) -> Measure:
    return Measure("monogamy", nodal=nodal)


@dataclass
class PowerResult:
    value: float
    argmax: ProductParams | BisepParams
    measure: str
    input_set: str
    x: np.ndarray = field(repr=False)
    restart_values: np.ndarray = field(repr=False)
    iterations: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class QuenchConfig:
    means: tuple[float, ...]
    sds: tuple[float, ...]
    realizations: int = 10_000
    seed: int = 0
    reuse_optimal_input: bool = False

    def __post_init__(self):
        object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        object.__setattr__(self, "sds", tuple(float(s) for s in self.sds))
        if len(self.means) != len(self.sds):
            raise ValueError("one standard deviation per mean expected")
        if any(s < 0 for s in self.sds):
            raise ValueError("standard deviations must be nonnegative")
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")


@dataclass
class QuenchResult:
    mean: float
    stderr: float
    sd: float
    n: int
    values: np.ndarray | None = field(default=None, repr=False)


@dataclass
class SurveyResult:
    values: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    mean: float = 0.0
    sd: float = 0.0
    errors: np.ndarray | None = field(default=None, repr=False)
    params: np.ndarray | None = field(default=None, repr=False)


# --- objective ---------------------------------------------------------------

def input_bounds(input_set: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    if input_set == "FS":
        return np.zeros(2 * n), np.concatenate([np.full(n, np.pi), np.full(n, 2 * np.pi)])
    if input_set == "BS":
        if n != 3:
            raise ValueError("biseparable inputs are the 12:3 cut of three qubits")
        return np.zeros(7), np.array([np.pi, np.pi, np.pi, 2 * np.pi, 2 * np.pi, np.pi, 2 * np.pi])
    raise ValueError(f"unknown input set {input_set!r}; choose FS or BS")


def _check_input_set(input_set: str, n: int) -> str:
    input_set = input_set.upper()
    input_bounds(input_set, n)
    return input_set


class Evaluator:
    """Measure of ``U (noisy input) U^dagger`` for stacks of gates and inputs.

    ``unitaries`` is either one matrix or a stack ``(P, d, d)``; rows passed
    to :meth:`__call__` pick which gate each input row belongs to.
    """

    def __init__(self, unitaries, measure: Measure, input_set: str, channels: Sequence[ChannelSpec] = ()):
        u = np.asarray(unitaries, dtype=complex)
        self.u = u if u.ndim == 3 else u[None]
        self.dim = self.u.shape[-1]
        self.layout = Layout.for_dim(self.dim)
        self.n = self.layout.n
        self.measure = measure
        self.input_set = _check_input_set(input_set, self.n)
        for c in channels:
            self.layout.check(c.target)
        self.noisy = any(c.kind != "Identity" and c.p > 0 for c in channels)
        if measure.kind == "ggm" and self.noisy:
            raise ValueError("GGM is defined for pure outputs only; use negativity or monogamy with noise")
        if measure.kind == "monogamy":
            if self.n < 3:
                raise ValueError("monogamy score needs at least three qubits")
            self.layout.check(measure.nodal)
        if measure.kind == "negativity":
            for s in measure.side:
                self.layout.check(s)
        self.local_ops = [single_qubit_map(channels, q) for q in range(self.n)]
        pair_layout = Layout.qubits(2)
        self.pair_ops = None
        if self.input_set == "BS":
            ops = [np.eye(4, dtype=complex)]
            for q in (0, 1):
                ops = [embed(k, q, pair_layout) @ o for o in ops for k in self.local_ops[q]]
            self.pair_ops = ops

    def _gates(self, rows):
        if self.u.shape[0] == 1:
            return self.u[0]
        return self.u[rows]

    def pure_inputs(self, x: np.ndarray) -> np.ndarray:
        if self.input_set == "FS":
            return product_batch(x[:, : self.n], x[:, self.n:])
        return bisep_batch(x)

    def noisy_inputs(self, x: np.ndarray) -> np.ndarray:
        if self.input_set == "FS":
            amps = qubit_amplitudes(x[:, : self.n], x[:, self.n:])
            rho = None
            for q in range(self.n):
                r = ket_to_dm(amps[:, q])
                r = sum(k @ r @ k.conj().T for k in self.local_ops[q])
                rho = r if rho is None else np.einsum("bij,bkl->bikjl", rho, r).reshape(len(x), rho.shape[1] * 2, -1)
            return rho
        pair = ket_to_dm(pair_amplitudes(x[:, :5]))
        pair = sum(k @ pair @ k.conj().T for k in self.pair_ops)
        single = ket_to_dm(qubit_amplitudes(x[:, 5], x[:, 6]))
        single = sum(k @ single @ k.conj().T for k in self.local_ops[2])
        return np.einsum("bij,bkl->bikjl", pair, single).reshape(len(x), 8, 8)

    def outputs(self, x: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Output states: vectors when noiseless, density matrices otherwise."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        rows = np.asarray(rows)
        u = self._gates(rows)
        if not self.noisy:
            psi = self.pure_inputs(x)
            return np.einsum("...ij,...j->...i", u, psi)
        rho = self.noisy_inputs(x)
        return u @ rho @ dagger(u)

    def __call__(self, x: np.ndarray, rows: np.ndarray) -> np.ndarray:
        out = self.outputs(x, rows)
        kind = self.measure.kind
        if not self.noisy:
            if kind == "ggm":
                return ggm_batch(out, self.n)
            if kind == "negativity" and self.n == 2:
                # pure two-qubit negativity is |a00 a11 - a01 a10|
                return np.abs(out[:, 0] * out[:, 3] - out[:, 1] * out[:, 2])
            out = ket_to_dm(out)
        if kind == "negativity":
            return negativity_batch(out, self.measure.side, self.layout)
        return monogamy_score_batch(out, self.measure.nodal, self.layout)


def _to_params(x: np.ndarray, input_set: str, n: int):
    if input_set == "FS":
        return canonicalize(ProductParams.from_vector(x, n))
    return canonicalize_bisep(BisepParams.from_vector(x))


def params_vector(params: ProductParams | BisepParams) -> np.ndarray:
    return params.to_vector()


def _unitary(gate) -> np.ndarray:
    return gate.unitary() if isinstance(gate, GateSpec) else np.asarray(gate, dtype=complex)


# --- single-gate powers --------------------------------------------------------

def _power(gate, measure: Measure, input_set: str, cfg: OptimizerConfig, channels, extra=None) -> PowerResult:
    ev = Evaluator(_unitary(gate), measure, input_set, channels)
    lo, hi = input_bounds(ev.input_set, ev.n)
    res = multistart_maximize(ev, [0], lo, hi, cfg, extra_starts=extra)
    x = res["x"][0]
    params = _to_params(x, ev.input_set, ev.n)
    return PowerResult(
        value=float(res["value"][0]),
        argmax=params,
        measure=measure.tag,
        input_set=ev.input_set,
        x=params.to_vector(),
        restart_values=res["restart_values"][0],
        iterations=res["iterations"][0],
    )


def entangling_power(gate, measure: Measure = GGM, input_set: str = "FS", cfg: OptimizerConfig | None = None) -> PowerResult:
    """Maximum entanglement of ``U|input>`` over the chosen separable input set.

    ``gate`` is a :class:`GateSpec` or a unitary matrix; ``input_set`` is
    ``FS`` (fully separable) or ``BS`` (three qubits, product across 12:3).
    """
    return _power(gate, measure, input_set, cfg or OptimizerConfig(), ())


def noisy_entangling_power(
    gate,
    channels: Sequence[ChannelSpec],
    measure: Measure = NEGATIVITY,
    input_set: str = "FS",
    cfg: OptimizerConfig | None = None,
    extra_starts: np.ndarray | None = None,
) -> PowerResult:
    """Entangling power when local channels act on the product input before the gate."""
    extra = None if extra_starts is None else np.atleast_2d(extra_starts)[None]
    return _power(gate, measure, input_set, cfg or OptimizerConfig(), channels, extra)


def power_batch(
    unitaries,
    measure: Measure = GGM,
    input_set: str = "FS",
    cfg: OptimizerConfig | None = None,
    channels: Sequence[ChannelSpec] = (),
) -> tuple[np.ndarray, np.ndarray]:
    """Powers of a stack of gates optimized together; returns ``(values, argmax rows)``.

    Gate ``k`` uses the restart stream of key ``k``, so each value equals
    what a separate call with the same seed would see for that key.
    """
    u = np.asarray(unitaries, dtype=complex)
    res = _optimize_stack(u, np.arange(len(u)), measure, input_set, channels, cfg or OptimizerConfig())
    n = Layout.for_dim(u.shape[-1]).n
    rows = np.stack([_to_params(x, input_set.upper(), n).to_vector() for x in res["x"]])
    return res["value"], rows


def evaluate_input(gate, params, measure: Measure, channels: Sequence[ChannelSpec] = (), input_set: str | None = None) -> float:
    """Measure of the output for one fixed input (no optimization)."""
    if isinstance(params, ProductParams):
        input_set, x = "FS", params.to_vector()
    elif isinstance(params, BisepParams):
        input_set, x = "BS", params.to_vector()
    else:
        x = np.asarray(params, dtype=float)
        input_set = input_set or "FS"
    ev = Evaluator(_unitary(gate), measure, input_set, channels)
    return float(ev(x[None], np.zeros(1, dtype=int))[0])


def power_error_delta(
    gate,
    channels: Sequence[ChannelSpec],
    measure: Measure = NEGATIVITY,
    input_set: str = "FS",
    cfg: OptimizerConfig | None = None,
) -> float:
    """Noisy power minus the noisy measure at the noiseless-optimal input.

    The noiseless optimum also seeds the noisy search, so the result is
    nonnegative up to roundoff.
    """
    cfg = cfg or OptimizerConfig()
    ideal = _power(gate, measure, input_set, cfg, ())
    noisy = _power(gate, measure, input_set, cfg, channels, ideal.x[None, None])
    at_ideal = evaluate_input(gate, ideal.x, measure, channels, ideal.input_set)
    return noisy.value - at_ideal


# --- chunked fan-out -------------------------------------------------------------

def _run_chunks(fn, chunks: list, jobs: int) -> list:
    if jobs <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, chunks))


def _chunks(n: int) -> list[np.ndarray]:
    return [np.arange(s, min(s + CHUNK, n)) for s in range(0, n, CHUNK)]


def _optimize_stack(u: np.ndarray, keys: np.ndarray, measure, input_set, channels, cfg, extra=None):
    ev = Evaluator(u, measure, input_set, channels)
    lo, hi = input_bounds(ev.input_set, ev.n)
    return multistart_maximize(ev, keys, lo, hi, cfg, extra_starts=extra)


# --- quenched average ------------------------------------------------------------

def _expand_params(gate: GateSpec, tie: Sequence[int | None], draws: np.ndarray) -> np.ndarray:
    """Gate parameter rows from disorder draws; ``tie[i]`` names the draw feeding parameter ``i``."""
    base = np.array(gate.params, dtype=float)
    out = np.repeat(base[None], len(draws), axis=0)
    for i, t in enumerate(tie):
        if t is not None:
            out[:, i] = draws[:, t]
    return out


def disorder_draws(qc: QuenchConfig, index: np.ndarray) -> np.ndarray:
    """Gaussian parameter draws for realizations ``index`` (one stream per realization)."""
    means, sds = np.array(qc.means), np.array(qc.sds)
    z = np.stack([problem_rng(qc.seed, i).standard_normal(len(means)) for i in index])
    return means + sds * z


def _quench_chunk(task):
    (gate, tie, qc, measure, input_set, channels, cfg, index, fixed_x) = task
    draws = disorder_draws(qc, index)
    u = gate_batch(gate, _expand_params(gate, tie, draws))
    if fixed_x is not None:
        ev = Evaluator(u, measure, input_set, channels)
        return ev(np.repeat(fixed_x[None], len(index), axis=0), np.arange(len(index)))
    return _optimize_stack(u, index, measure, input_set, channels, cfg)["value"]


def quenched_average_power(
    gate: GateSpec,
    measure: Measure,
    input_set: str,
    qc: QuenchConfig,
    cfg: OptimizerConfig | None = None,
    tie: Sequence[int | None] | None = None,
    channels: Sequence[ChannelSpec] = (),
    jobs: int = 1,
    keep_values: bool = False,
) -> QuenchResult:
    """Average power over Gaussian draws of the gate parameters.

    ``gate.params`` are the fixed values; ``tie`` maps each gate parameter to
    a disorder variable (index into ``qc.means``) or ``None`` to keep it
    fixed. By default parameter ``i`` follows variable ``i``. Draws are not
    wrapped into any period. With ``qc.reuse_optimal_input`` the input is
    optimized once at the mean parameters and re-used for every draw, which
    is exact only for families whose optimal input does not move with the
    parameters.
    """
    cfg = cfg or OptimizerConfig()
    if tie is None:
        if len(qc.means) != len(gate.params):
            raise ValueError("without a tie map every gate parameter needs its own mean")
        tie = tuple(range(len(qc.means)))
    tie = tuple(tie)
    if len(tie) != len(gate.params) or any(t is not None and not 0 <= t < len(qc.means) for t in tie):
        raise ValueError(f"tie map {tie} does not fit {len(gate.params)} parameters and {len(qc.means)} variables")

    mean_gate = gate.with_params(_expand_params(gate, tie, np.array([qc.means]))[0])
    n = qc.realizations
    if not any(qc.sds):
        res = _power(mean_gate, measure, input_set, cfg, channels)
        vals = np.full(n, res.value)
        return QuenchResult(res.value, 0.0, 0.0, n, vals if keep_values else None)

    fixed_x = None
    if qc.reuse_optimal_input:
        ref = _power(mean_gate, measure, input_set, cfg, channels)
        if ref.value < REFERENCE_FLOOR:
            # a non-entangling mean gate leaves the optimal input undetermined
            first = _expand_params(gate, tie, disorder_draws(qc, np.array([0])))[0]
            ref = _power(gate.with_params(first), measure, input_set, cfg, channels)
        fixed_x = ref.x
    tasks = [(gate, tie, qc, measure, input_set, tuple(channels), cfg, idx, fixed_x) for idx in _chunks(n)]
    vals = np.concatenate(_run_chunks(_quench_chunk, tasks, jobs))
    return summarize(vals, keep_values)


def summarize(vals: np.ndarray, keep_values: bool = False) -> QuenchResult:
    n = len(vals)
    mean = float(np.sum(vals) / n)
    sd = float(np.std(vals, ddof=1)) if n > 1 else 0.0
    return QuenchResult(mean, sd / np.sqrt(n), sd, n, vals if keep_values else None)


# --- random gate survey ------------------------------------------------------------

def survey_gate_params(seed: int, index: np.ndarray, source: str) -> np.ndarray:
    if source == "nl":
        return np.stack([problem_rng(seed, i).uniform(0, np.pi / 2, size=3) for i in index])
    if source == "haar":
        return np.asarray(index, dtype=float)[:, None]
    raise ValueError(f"unknown survey source {source!r}; choose nl or haar")


def survey_unitaries(seed: int, index: np.ndarray, source: str, dim: int = 4) -> np.ndarray:
    params = survey_gate_params(seed, index, source)
    if source == "nl":
        return canonical_nl_batch(params)
    from .gates import haar_random

    return np.stack([haar_random(dim, np.random.SeedSequence([int(seed), int(i)])) for i in index])


def _survey_chunk(task):
    (seed, source, dim, measure, input_set, channels, cfg, index, with_error) = task
    u = survey_unitaries(seed, index, source, dim)
    if not with_error:
        return _optimize_stack(u, index, measure, input_set, channels, cfg)["value"], None
    ideal = _optimize_stack(u, index, measure, input_set, (), cfg)
    noisy = _optimize_stack(u, index, measure, input_set, channels, cfg, extra=ideal["x"][:, None, :])
    ev = Evaluator(u, measure, input_set, channels)
    at_ideal = ev(ideal["x"], np.arange(len(index)))
    return noisy["value"], noisy["value"] - at_ideal


def haar_survey(
    n_gates: int,
    channels: Sequence[ChannelSpec] = (),
    measure: Measure = NEGATIVITY,
    input_set: str = "FS",
    bins: int = 25,
    cfg: OptimizerConfig | None = None,
    seed: int = 0,
    source: str = "nl",
    dim: int = 4,
    with_error: bool = False,
    jobs: int = 1,
    value_range: tuple[float, float] = (0.0, 0.5),
) -> SurveyResult:
    """Distribution of (noisy) entangling power over random gates.

    ``source="nl"`` draws the three couplings of the nonlocal two-qubit core
    uniformly from ``[0, pi/2]``; ``source="haar"`` draws Haar unitaries of
    dimension ``dim``. Bin masses are normalized frequencies over
    ``value_range`` split into ``bins`` equal intervals (values on the edges
    are clipped into the outer bins).
    """
    if n_gates < 1:
        raise ValueError("n_gates must be at least 1")
    cfg = cfg or OptimizerConfig()
    tasks = [
        (seed, source, dim, measure, input_set, tuple(channels), cfg, idx, with_error)
        for idx in _chunks(n_gates)
    ]
    out = _run_chunks(_survey_chunk, tasks, jobs)
    vals = np.concatenate([o[0] for o in out])
    errs = np.concatenate([o[1] for o in out]) if with_error else None
    edges = np.linspace(value_range[0], value_range[1], bins + 1)
    counts, _ = np.histogram(np.clip(vals, value_range[0], value_range[1]), bins=edges)
    stats = summarize(vals)
    return SurveyResult(
        values=vals,
        edges=edges,
        masses=counts / n_gates,
        mean=stats.mean,
        sd=stats.sd,
        errors=errs,
        params=survey_gate_params(seed, np.arange(n_gates), source) if source == "nl" else None,
    )
