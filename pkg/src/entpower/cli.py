"""Command-line front end.

Experiments are described by flat ``key = value`` config files (sections are
allowed and merged) and/or command-line flags; flags win. Every run writes
CSV with nine significant digits and LF line endings.

Exit status: 0 on success, 1 when ``--verify`` finds a violated check, 2 for
an invalid configuration.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import oracles
from .channels import KINDS, on_qubits
from .figures import FIGURES, Settings, Table, reproduce, verify
from .gates import FAMILIES, GateSpec, load_matrix
from .optimize import OptimizerConfig
from .power import (
    Measure,
    QuenchConfig,
    entangling_power,
    haar_survey,
    noisy_entangling_power,
    quenched_average_power,
)

EXPERIMENTS = ("power", "quench", "noisy", "survey", "reproduce")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config field '{key}': {message}")
        self.key = key


# --- config --------------------------------------------------------------------------

def read_config(text: str) -> dict[str, str]:
    """Flat key-value mapping from config text; section headers are optional."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    body = text if text.lstrip().startswith("[") else "[experiment]\n" + text
    try:
        parser.read_string(body)
    except configparser.Error as exc:
        raise ConfigError("<file>", f"unparseable: {exc}") from None
    flat: dict[str, str] = {}
    for section in parser.sections():
        flat.update({k.replace("-", "_"): v.strip() for k, v in parser[section].items()})
    return flat


def _floats(key: str, text: str | None) -> tuple[float, ...]:
    if text is None or text == "":
        return ()
    try:
        return tuple(float(eval_angle(t)) for t in text.replace(";", ",").split(","))
    except ValueError:
        raise ConfigError(key, f"expected comma-separated numbers, got {text!r}") from None


def eval_angle(token: str) -> float:
    """A number, optionally written with ``pi`` (``pi/4``, ``3*pi/4``, ``2pi``)."""
    t = token.strip().lower().replace(" ", "")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    num = num.replace("*", "").replace("pi", "") or "1"
    value = (-1.0 if num == "-" else float(num)) * np.pi
    return value / float(den) if den else value


def _int(key: str, text, default=None):
    if text is None or text == "":
        return default
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _bool(key: str, text, default=False) -> bool:
    if text is None or text == "":
        return default
    t = str(text).lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected true/false, got {text!r}")


@dataclass
class ExperimentConfig:
    experiment: str
    gate: GateSpec | None = None
    measure: Measure | None = None
    input_set: str = "FS"
    channel: str | None = None
    ps: tuple[float, ...] = (0.0,)
    targets: tuple[int, ...] = (0,)
    means: tuple[float, ...] = ()
    sds: tuple[float, ...] = ()
    sigmas: tuple[float, ...] = ()
    tie: tuple[int | None, ...] | None = None
    realizations: int = 10_000
    reuse_optimal_input: bool = False
    n_gates: int = 10_000
    bins: int = 25
    source: str = "nl"
    with_error: bool = False
    figure: str | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    restarts_given: bool = False

    @classmethod
    def from_mapping(cls, m: dict[str, str]) -> "ExperimentConfig":
        exp = m.get("experiment")
        if not exp:
            raise ConfigError("experiment", f"missing; choose one of {', '.join(EXPERIMENTS)}")
        if exp not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown {exp!r}; choose one of {', '.join(EXPERIMENTS)}")
        seed = _int("seed", m.get("seed"), 0)
        opt = OptimizerConfig(
            restarts=_int("restarts", m.get("restarts"), 50),
            max_iters=_int("max_iters", m.get("max_iters"), 2000),
            seed=seed,
        )
        cfg = cls(experiment=exp, optimizer=opt, seed=seed, jobs=_int("jobs", m.get("jobs"), 1), out=m.get("out"))
        if exp == "reproduce":
            fig = m.get("figure")
            if fig not in FIGURES:
                raise ConfigError("figure", f"unknown {fig!r}; available: {', '.join(FIGURES)}")
            cfg.figure = fig
            cfg.realizations = _int("realizations", m.get("realizations"))
            cfg.n_gates = _int("n_gates", m.get("n_gates"))
            cfg.optimizer = OptimizerConfig(restarts=_int("restarts", m.get("restarts"), 1), seed=seed)
            cfg.restarts_given = m.get("restarts") not in (None, "")
            return cfg
        cfg.measure = _measure(m)
        cfg.input_set = (m.get("input_set") or "FS").upper()
        if cfg.input_set not in ("FS", "BS"):
            raise ConfigError("input_set", f"expected FS or BS, got {cfg.input_set!r}")
        if exp == "survey":
            cfg.n_gates = _int("n_gates", m.get("n_gates"), 10_000)
            cfg.bins = _int("bins", m.get("bins"), 25)
            cfg.source = m.get("source") or "nl"
            if cfg.source not in ("nl", "haar"):
                raise ConfigError("source", f"expected nl or haar, got {cfg.source!r}")
            cfg.with_error = _bool("with_error", m.get("with_error"))
            if cfg.n_gates < 1:
                raise ConfigError("n_gates", "must be at least 1")
        else:
            cfg.gate = _gate(m)
        _channels(cfg, m)
        if cfg.measure.kind == "ggm" and cfg.channel and any(p > 0 for p in cfg.ps):
            raise ConfigError("measure", "GGM needs pure outputs; pick negativity or monogamy with a channel")
        if exp == "quench":
            _quench(cfg, m)
        return cfg


def _measure(m) -> Measure:
    try:
        return Measure.parse(m.get("measure") or "negativity")
    except ValueError as exc:
        raise ConfigError("measure", str(exc)) from None


def _gate(m) -> GateSpec:
    family = m.get("gate")
    if not family:
        raise ConfigError("gate", f"missing; choose one of {', '.join(FAMILIES)}")
    if family not in FAMILIES:
        raise ConfigError("gate", f"unknown {family!r}; choose one of {', '.join(FAMILIES)}")
    params = _floats("params", m.get("params"))
    dim = _int("dim", m.get("dim"), 4)
    matrix = None
    if family == "fixed":
        path = m.get("matrix")
        if not path:
            raise ConfigError("matrix", "a fixed gate needs a matrix file")
        try:
            matrix = load_matrix(path)
        except (OSError, ValueError) as exc:
            raise ConfigError("matrix", str(exc)) from None
    try:
        gate = GateSpec(family, params, dim, matrix)
        gate.unitary()
    except (ValueError, IndexError) as exc:
        raise ConfigError("params", str(exc)) from None
    if not gate.check_unitary(5e-4):
        raise ConfigError("matrix", "not unitary within 5e-4")
    return gate


def _channels(cfg: ExperimentConfig, m):
    kind = m.get("channel")
    if kind in (None, "", "none"):
        cfg.channel = None
        return
    match = [k for k in KINDS if k.lower() == kind.lower()]
    if not match:
        raise ConfigError("channel", f"unknown {kind!r}; choose one of {', '.join(KINDS)}")
    cfg.channel = match[0]
    cfg.ps = _floats("p", m.get("p")) or (0.0,)
    if any(not 0 <= p <= 1 for p in cfg.ps):
        raise ConfigError("p", "noise strengths must lie in [0, 1]")
    cfg.targets = tuple(int(t) for t in _floats("targets", m.get("targets"))) or (0,)


def _quench(cfg: ExperimentConfig, m):
    cfg.means = _floats("means", m.get("means"))
    if not cfg.means:
        raise ConfigError("means", "quench needs the mean of every disordered variable")
    cfg.sds = _floats("sds", m.get("sds")) or (0.0,) * len(cfg.means)
    if len(cfg.sds) != len(cfg.means):
        raise ConfigError("sds", "one standard deviation per mean expected")
    cfg.sigmas = _floats("sigmas", m.get("sigmas"))
    cfg.realizations = _int("realizations", m.get("realizations"), 10_000)
    cfg.reuse_optimal_input = _bool("reuse_optimal_input", m.get("reuse_optimal_input"))
    tie = m.get("tie")
    if tie:
        cfg.tie = tuple(None if t.strip().lower() in ("none", "-", "") else int(t) for t in tie.split(","))
        if len(cfg.tie) != len(cfg.gate.params):
            raise ConfigError("tie", f"needs {len(cfg.gate.params)} entries")
    elif len(cfg.means) != len(cfg.gate.params):
        raise ConfigError("tie", "without a tie map every gate parameter needs its own mean")


# --- CSV -------------------------------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for r in table.rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _emit(table: Table, out: str | None, suffix: str = "") -> None:
    text = to_csv(table)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if suffix:
        path = path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


# --- runners ---------------------------------------------------------------------------

def _arg_names(input_set: str, n: int) -> list[str]:
    if input_set == "BS":
        return ["pair_theta_1", "pair_theta_2", "pair_theta_3", "pair_xi_1", "pair_xi_2", "theta", "xi"]
    return [f"theta_{k}" for k in range(n)] + [f"xi_{k}" for k in range(n)]


def _oracle_value(cfg: ExperimentConfig):
    g, kind = cfg.gate, cfg.measure.kind
    if g.family == "diagonal" and g.dim == 4 and kind in ("ggm", "negativity") and cfg.input_set == "FS":
        phis = (0.0,) * (4 - len(g.params)) + g.params
        return (oracles.ggm_diag4 if kind == "ggm" else oracles.neg_diag4)(*phis)
    if g.family == "nl" and len(set(g.params)) == 1 and kind == "ggm":
        return oracles.ggm_unl_equalJ(g.params[0])
    return None


def run_power(cfg: ExperimentConfig, check: bool) -> tuple[list[Table], list]:
    res = entangling_power(cfg.gate, cfg.measure, cfg.input_set, cfg.optimizer)
    names = _arg_names(res.input_set, cfg.gate.n_qubits)
    tab = Table(["measure", "input_set", "value"] + names)
    tab.rows.append([res.measure, res.input_set, res.value] + list(res.x))
    checks = []
    if check:
        ref = _oracle_value(cfg)
        if ref is not None:
            checks.append(("closed form agrees within 1e-6", abs(res.value - ref) <= 1e-6, f"{res.value:.9g} vs {ref:.9g}"))
    return [tab], checks


def run_noisy(cfg: ExperimentConfig, check: bool):
    tab = Table(["channel", "targets", "p", "value"])
    vals = []
    for p in cfg.ps:
        chans = on_qubits(cfg.channel, p, cfg.targets) if cfg.channel else []
        res = noisy_entangling_power(cfg.gate, chans, cfg.measure, cfg.input_set, cfg.optimizer)
        vals.append(res.value)
        tab.rows.append([cfg.channel or "none", " ".join(map(str, cfg.targets)), p, res.value])
    checks = []
    if check and cfg.channel:
        ideal = entangling_power(cfg.gate, cfg.measure, cfg.input_set, cfg.optimizer).value
        worst = max(vals) - ideal
        checks.append(("noise never raises the power", worst <= 1e-9, f"max excess {worst:.3g}"))
    return [tab], checks


def run_quench(cfg: ExperimentConfig, check: bool):
    chans = on_qubits(cfg.channel, cfg.ps[0], cfg.targets) if cfg.channel else []
    sweeps = [(s,) * len(cfg.means) for s in cfg.sigmas] or [cfg.sds]
    tab = Table(["sds", "e_avg", "stderr", "sd", "n"])
    for sds in sweeps:
        qc = QuenchConfig(cfg.means, sds, cfg.realizations, cfg.seed, cfg.reuse_optimal_input)
        r = quenched_average_power(cfg.gate, cfg.measure, cfg.input_set, qc, cfg.optimizer, cfg.tie, chans, cfg.jobs)
        tab.rows.append([" ".join(fmt(s) for s in sds), r.mean, r.stderr, r.sd, r.n])
    return [tab], []


def run_survey(cfg: ExperimentConfig, check: bool):
    chans = on_qubits(cfg.channel, cfg.ps[0], cfg.targets) if cfg.channel else []
    s = haar_survey(cfg.n_gates, chans, cfg.measure, cfg.input_set, cfg.bins, cfg.optimizer, cfg.seed,
                    cfg.source, with_error=cfg.with_error, jobs=cfg.jobs)
    hist = Table(["bin_lo", "bin_hi", "mass"], [[a, b, m] for a, b, m in zip(s.edges[:-1], s.edges[1:], s.masses)])
    summary = Table(["n", "mean", "sd", "stderr"], [[len(s.values), s.mean, s.sd, s.sd / np.sqrt(len(s.values))]])
    tables = [hist, summary]
    if cfg.with_error:
        vals = Table(["gate", "power", "error"], [[i, v, e] for i, (v, e) in enumerate(zip(s.values, s.errors))])
        tables.append(vals)
    checks = []
    if check:
        total = float(np.sum(s.masses))
        checks.append(("bin masses sum to 1", abs(total - 1) < 1e-12, f"{total:.12g}"))
    return tables, checks


RUNNERS = {"power": run_power, "noisy": run_noisy, "quench": run_quench, "survey": run_survey}


# --- argument parsing -------------------------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommand copies must not overwrite values given before the subcommand
    d = {"default": argparse.SUPPRESS} if suppress else {}
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value experiment file", **d)
    common.add_argument("--seed", type=int, **d)
    common.add_argument("--jobs", type=int, help="worker processes (results do not depend on it)", **d)
    common.add_argument("--out", help="CSV path (a directory for reproduce); stdout if omitted", **d)
    common.add_argument("--verify", action="store_true", help="run shape or closed-form checks, exit 1 on failure", **d)
    common.add_argument("--restarts", type=int, **d)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--gate", choices=FAMILIES)
    model.add_argument("--params", help="comma-separated gate parameters; 'pi' allowed, e.g. pi/4")
    model.add_argument("--dim", type=int)
    model.add_argument("--matrix", help="matrix file for --gate fixed")
    model.add_argument("--measure", help="ggm, negativity or monogamy[:nodal]")
    model.add_argument("--input-set", choices=("FS", "BS"))
    model.add_argument("--channel", choices=KINDS)
    model.add_argument("--p", help="noise strength(s), comma-separated")
    model.add_argument("--targets", help="qubits the channel acts on, comma-separated (0-based)")

    parser = argparse.ArgumentParser(prog="entpower", description=__doc__.splitlines()[0], parents=[_common(False)])
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("power", parents=[common, model], help="ideal entangling power")
    sub.add_parser("noisy", parents=[common, model], help="power with local noise on the inputs")
    q = sub.add_parser("quench", parents=[common, model], help="average over Gaussian parameter disorder")
    q.add_argument("--means")
    q.add_argument("--sds")
    q.add_argument("--sigmas", help="sweep: common standard deviation for every variable")
    q.add_argument("--tie", help="variable index per gate parameter, 'none' keeps it fixed")
    q.add_argument("--realizations", type=int)
    q.add_argument("--reuse-input", dest="reuse_optimal_input", action="store_const", const="true")
    s = sub.add_parser("survey", parents=[common, model], help="power distribution over random gates")
    s.add_argument("--n-gates", type=int)
    s.add_argument("--bins", type=int)
    s.add_argument("--source", choices=("nl", "haar"))
    s.add_argument("--with-error", action="store_const", const="true")
    r = sub.add_parser("reproduce", parents=[common], help="figure tables")
    r.add_argument("figure", help=", ".join(FIGURES))
    r.add_argument("--realizations", type=int)
    r.add_argument("--n-gates", type=int)
    return parser


def _merge(args: argparse.Namespace) -> dict[str, str]:
    merged: dict[str, str] = {}
    if args.config:
        try:
            merged.update(read_config(Path(args.config).read_text()))
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
    if args.command:
        merged["experiment"] = args.command
    for key, val in vars(args).items():
        if key in ("config", "command", "verify") or val is None:
            continue
        merged[key] = str(val)
    return merged


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = ExperimentConfig.from_mapping(_merge(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if cfg.experiment == "reproduce":
        settings = Settings(
            realizations=cfg.realizations,
            restarts=cfg.optimizer.restarts if cfg.restarts_given else None,
            n_gates=cfg.n_gates,
            seed=cfg.seed,
            jobs=cfg.jobs,
        )
        tables = reproduce(cfg.figure, settings)
        outdir = Path(cfg.out or ".")
        outdir.mkdir(parents=True, exist_ok=True)
        for name, tab in tables.items():
            _emit(tab, str(outdir / f"{name}.csv"))
        checks = [(c.name, c.ok, c.detail) for c in verify(cfg.figure, tables)] if args.verify else []
    else:
        tables, checks = RUNNERS[cfg.experiment](cfg, args.verify)
        suffixes = ["", "summary", "values"]
        for tab, suffix in zip(tables, suffixes):
            if cfg.out is None and suffix:
                sys.stdout.write("\n")
            _emit(tab, cfg.out, suffix)

    failed = False
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", file=sys.stderr)
        failed |= not ok
    return 1 if failed else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
