"""Figure reproduction: parameter sets, CSV tables and qualitative shape checks.

Each figure builder returns a mapping ``table name -> Table``; the CLI writes
one CSV per table. :func:`verify` runs the shape assertions for a figure on
the tables it produced.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import on_qubits
from .gates import GateSpec, diag_unitary, fixture_haar, haar_random, transposition_unitary
from .optimize import OptimizerConfig
from .oracles import quenched_ggm_diag1_quadrature, quenched_neg_diag1_quadrature
from .power import (
    GGM,
    NEGATIVITY,
    QuenchConfig,
    haar_survey,
    monogamy,
    noisy_entangling_power,
    quenched_average_power,
)

PI = np.pi
CHANNEL_KINDS = ("ADC", "PDC", "DPC")


@dataclass
class Settings:
    """Sample sizes for a reproduction run; ``None`` means the figure's own default."""

    realizations: int | None = None
    restarts: int | None = None
    n_gates: int | None = None
    seed: int = 0
    jobs: int = 1

    def cfg(self, restarts: int) -> OptimizerConfig:
        return OptimizerConfig(restarts=self.restarts or restarts, seed=self.seed)


@dataclass
class Table:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def column(self, name: str, where: dict | None = None) -> np.ndarray:
        i = self.header.index(name)
        keep = self._filter(where)
        return np.array([r[i] for r in keep], dtype=float)

    def _filter(self, where):
        if not where:
            return self.rows
        idx = {k: self.header.index(k) for k in where}
        return [r for r in self.rows if all(r[idx[k]] == v for k, v in where.items())]


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


SIGMAS = np.linspace(0.0, 1.5, 10)
P_GRID = np.round(np.linspace(0.0, 1.0, 11), 10)


# --- quench curves over sigma -------------------------------------------------------

def _sigma_table(curves, measure, settings: Settings, realizations: int, restarts: int, input_sets=("FS",)):
    tab = Table(["curve", "input_set", "sigma", "e_avg", "stderr"])
    for label, dim, means, reuse in curves:
        gate = GateSpec("diagonal", tuple(means), dim)
        for iset in input_sets:
            for s in SIGMAS:
                qc = QuenchConfig(
                    tuple(means),
                    (float(s),) * len(means),
                    settings.realizations or realizations,
                    settings.seed,
                    reuse_optimal_input=reuse,
                )
                r = quenched_average_power(gate, measure, iset, qc, settings.cfg(restarts), jobs=settings.jobs)
                tab.rows.append([label, iset, float(s), r.mean, r.stderr])
    return tab


def _two_qubit_diag(means_by_k):
    # the optimal input of the one-phase family does not move with the phase
    return [(f"U_d{k}", 4, m, k == 1) for k, m in means_by_k]


def fig2(settings: Settings):
    curves = _two_qubit_diag([(1, [PI / 10]), (2, [PI / 10, PI / 6]), (3, [PI / 10, PI / 6, PI / 4]),
                              (4, [PI / 10, PI / 6, PI / 4, 3 * PI / 4])])
    return {"fig2": _sigma_table(curves, GGM, settings, 1000, 6)}


def fig3(settings: Settings):
    curves = _two_qubit_diag([(1, [PI]), (2, [PI, PI / 15]), (3, [PI, PI / 10, PI / 15]),
                              (4, [PI, PI / 6, PI / 10, PI / 15])])
    return {"fig3": _sigma_table(curves, GGM, settings, 1000, 6)}


def fig4(settings: Settings):
    curves = _two_qubit_diag([(1, [PI / 1.3]), (2, [PI, PI / 4]), (3, [PI, PI / 6, PI / 2]),
                              (4, [PI, PI / 4, PI / 9, PI / 15])])
    return {"fig4": _sigma_table(curves, GGM, settings, 1000, 6)}


def fig5(settings: Settings):
    curves = _two_qubit_diag([(1, [PI / 4]), (2, [PI / 2, PI / 6]), (3, [PI / 2, PI / 10, PI / 15]),
                              (4, [PI / 2, PI / 6, PI / 8, PI / 10])])
    return {"fig5": _sigma_table(curves, NEGATIVITY, settings, 1000, 6)}


# --- nonlocal core quenched over <J> --------------------------------------------------

J_GRID = np.linspace(0.0, PI, 25)
J_SIGMAS = (0.0, 0.2, 0.4)


def _j_table(measure, settings, equal: bool, realizations: int, restarts: int):
    tab = Table(["sigma", "mean_j", "e_avg", "stderr"])
    for s in J_SIGMAS:
        for mj in J_GRID:
            if equal:
                gate, tie = GateSpec("nl", (mj, mj, mj)), (0, 0, 0)
            else:
                gate, tie = GateSpec("nl", (0.7, mj, mj)), (None, 0, 0)
            qc = QuenchConfig((float(mj),), (s,), settings.realizations or realizations, settings.seed,
                              reuse_optimal_input=equal)
            r = quenched_average_power(gate, measure, "FS", qc, settings.cfg(restarts), tie=tie, jobs=settings.jobs)
            tab.rows.append([s, float(mj), r.mean, r.stderr])
    return tab


def fig6(settings: Settings):
    return {"fig6": _j_table(GGM, settings, True, 2000, 6)}


def fig7(settings: Settings):
    return {"fig7": _j_table(NEGATIVITY, settings, True, 2000, 6)}


def fig8(settings: Settings):
    return {"fig8": _j_table(GGM, settings, False, 300, 6)}


# --- noise -----------------------------------------------------------------------------

def fig9(settings: Settings):
    """Survey histograms and input-mismatch errors; noise acts on qubit 0."""
    n = settings.n_gates or 1000
    cfg = settings.cfg(6)
    hist = Table(["channel", "p", "bin_lo", "bin_hi", "mass"])
    summary = Table(["channel", "p", "mean", "sd", "n"])
    errors = Table(["channel", "p", "gate", "power", "error"])
    base = haar_survey(n, (), NEGATIVITY, "FS", cfg=cfg, seed=settings.seed, jobs=settings.jobs)
    runs = [("none", 0.0, base)]
    for kind in ("ADC", "DPC"):
        for p in (0.2, 0.8):
            runs.append((kind, p, haar_survey(n, on_qubits(kind, p, [0]), NEGATIVITY, "FS", cfg=cfg,
                                              seed=settings.seed, with_error=True, jobs=settings.jobs)))
    for kind, p, s in runs:
        for lo, hi, m in zip(s.edges[:-1], s.edges[1:], s.masses):
            hist.rows.append([kind, p, lo, hi, m])
        summary.rows.append([kind, p, s.mean, s.sd, len(s.values)])
        if s.errors is not None:
            for g, (v, e) in enumerate(zip(s.values, s.errors)):
                errors.rows.append([kind, p, g, v, e])
    return {"fig9_hist": hist, "fig9_summary": summary, "fig9_error": errors}


def _noise_table(gates, targets, measure, input_sets, cfg, kinds=CHANNEL_KINDS, ps=P_GRID):
    tab = Table(["gate", "channel", "input_set", "p", "e_noisy"])
    for label, u in gates:
        for kind in kinds:
            for iset in input_sets:
                for p in ps:
                    r = noisy_entangling_power(u, on_qubits(kind, float(p), targets), measure, iset, cfg)
                    tab.rows.append([label, kind, iset, float(p), r.value])
    return tab


def fig10_gates():
    return [("U_d2", diag_unitary([PI / 2, PI / 6], 4)), ("U_d4", diag_unitary([PI / 2, PI / 6, PI / 8, PI / 10]))]


def fig10(settings: Settings):
    """Noise on both input qubits."""
    return {"fig10": _noise_table(fig10_gates(), [0, 1], NEGATIVITY, ("FS",), settings.cfg(10))}


def fig11(settings: Settings):
    gates = [(f"U{k}", fixture_haar(k)) for k in range(1, 6)]
    ps = np.round(np.linspace(0.0, 0.9, 10), 10)
    return {"fig11": _noise_table(gates, [0, 1], NEGATIVITY, ("FS",), settings.cfg(10), ("PDC",), ps)}


def fig12(settings: Settings):
    curves = [("phi=2.4161", 8, [2.4161], False), ("phi=0.7854", 8, [0.7854], False)]
    return {"fig12": _sigma_table(curves, GGM, settings, 200, 6, input_sets=("FS", "BS"))}


def fig12b(settings: Settings):
    """Fully separable quench of the one-phase diagonal gate on three to five qubits."""
    curves = [(f"n={n}", 2**n, [2.4161], False) for n in (3, 4, 5)]
    return {"fig12b": _sigma_table(curves, GGM, settings, 32, 4)}


def _three_qubit_noise(label, u, settings):
    return _noise_table([(label, u)], [0, 1, 2], monogamy(1), ("FS", "BS"), settings.cfg(10))


def fig13(settings: Settings):
    return {"fig13": _three_qubit_noise("U_d1_8", diag_unitary([PI], 8), settings)}


def fig14(settings: Settings):
    return {"fig14": _three_qubit_noise("P(1,7)", transposition_unitary(1, 7, 8), settings)}


def fig15(settings: Settings):
    gates = [(f"H{k}", haar_random(8, np.random.SeedSequence([settings.seed, k]))) for k in range(1, 6)]
    ps = np.round(np.linspace(0.0, 0.9, 10), 10)
    return {"fig15": _noise_table(gates, [0, 1, 2], monogamy(1), ("FS", "BS"), settings.cfg(10), ("PDC",), ps)}


FIGURES: dict[str, Callable[[Settings], dict[str, Table]]] = {
    "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6, "fig7": fig7, "fig8": fig8,
    "fig9": fig9, "fig10": fig10, "fig11": fig11, "fig12": fig12, "fig12b": fig12b, "fig13": fig13,
    "fig14": fig14, "fig15": fig15,
}


def reproduce(fig: str, settings: Settings | None = None) -> dict[str, Table]:
    if fig not in FIGURES:
        raise KeyError(f"unknown figure {fig!r}; available: {', '.join(FIGURES)}")
    return FIGURES[fig](settings or Settings())


# --- shape predicates ------------------------------------------------------------------

def increasing(vals, ses, strict=True) -> tuple[bool, str]:
    """Every step up and the total rise at least three combined standard errors."""
    vals, ses = np.asarray(vals), np.asarray(ses)
    steps = np.diff(vals)
    rise = vals[-1] - vals[0]
    band = 3 * np.hypot(ses[0], ses[-1])
    ok = (np.all(steps > 0) if strict else True) and rise >= band
    return bool(ok), f"rise {rise:.4g} vs 3 SE {band:.4g}, min step {steps.min():.3g}"


def decreasing(vals, ses, strict=True) -> tuple[bool, str]:
    ok, _ = increasing(-np.asarray(vals), ses, strict)
    drop = vals[0] - vals[-1]
    return ok, f"drop {drop:.4g}, max step {np.diff(vals).max():.3g}"


def non_increasing(vals, ses) -> tuple[bool, str]:
    """No step up and a net drop.

    Every sigma reuses the same standard-normal draws, so the sampled path is
    smooth even at a few dozen realizations; unlike :func:`decreasing` the
    net drop need not clear the standard-error band.
    """
    steps = np.diff(np.asarray(vals))
    ok = bool(np.all(steps <= 1e-12) and vals[-1] < vals[0])
    return ok, f"drop {vals[0] - vals[-1]:.4g}, max step {steps.max():.3g}"


def single_interior_extremum(vals, ses) -> tuple[bool, str]:
    """Exactly one turning point, with both flanks larger than three standard errors."""
    vals, ses = np.asarray(vals), np.asarray(ses)
    k = int(np.argmax(vals))
    kind = "max"
    if k in (0, len(vals) - 1):
        k, kind = int(np.argmin(vals)), "min"
    if k in (0, len(vals) - 1):
        return False, "monotone"
    sign = 1 if kind == "max" else -1
    left, right = sign * (vals[k] - vals[0]), sign * (vals[k] - vals[-1])
    ok = left > 3 * np.hypot(ses[0], ses[k]) and right > 3 * np.hypot(ses[-1], ses[k])
    # no second turning point larger than the noise
    steps = sign * np.diff(vals)
    tol = 3 * np.max(ses)
    ok = ok and np.all(steps[:k] > -tol) and np.all(steps[k:] < tol)
    return bool(ok), f"interior {kind} at index {k}, flanks {left:.4g} / {right:.4g}"


def _sigma_curves(tab: Table):
    out = {}
    for r in tab.rows:
        out.setdefault((r[0], r[1]), []).append((r[2], r[3], r[4]))
    return {k: np.array(v) for k, v in out.items()}


def _verify_sigma(tab: Table, rule, curves=None) -> list[Check]:
    checks = []
    for (label, iset), arr in _sigma_curves(tab).items():
        if curves is not None and label not in curves:
            continue
        ok, detail = rule(arr[:, 1], arr[:, 2])
        checks.append(Check(f"{label} {iset} {rule.__name__}", ok, detail))
    return checks


# the one-phase curve of each sigma figure, with its exact Gaussian average
U_D1_CURVES = {
    "fig2": (PI / 10, quenched_ggm_diag1_quadrature, increasing),
    "fig3": (PI, quenched_ggm_diag1_quadrature, decreasing),
    "fig4": (PI / 1.3, quenched_ggm_diag1_quadrature, single_interior_extremum),
    "fig5": (PI / 4, quenched_neg_diag1_quadrature, single_interior_extremum),
}


def _against_exact(arr, mean, exact, rule, label, sampled_shape=False) -> list[Check]:
    """Sampled quench curve against its exact Gaussian average, then the shape of the exact curve.

    Some extrema are only a few 1e-3 deep, below the sampling noise of a few
    hundred draws, so the shape is asserted on the quadrature curve and the
    data are required to agree with it within 4 standard errors.
    """
    ref = np.array([exact(mean, s) for s in arr[:, 0]])
    dev = np.abs(arr[:, 1] - ref)
    z = np.where(arr[:, 2] > 0, dev / np.where(arr[:, 2] > 0, arr[:, 2], 1), np.where(dev < 1e-9, 0, np.inf))
    checks = [Check(f"{label} matches Gaussian average", bool(z.max() <= 4), f"max |z| {z.max():.3g}")]
    ok, detail = rule(ref, np.zeros_like(ref))
    checks.append(Check(f"{label} exact curve {rule.__name__}", ok, detail))
    if sampled_shape:
        ok, detail = rule(arr[:, 1], arr[:, 2])
        checks.append(Check(f"{label} {rule.__name__}", ok, detail))
    return checks


def _verify_u_d1(fig: str, tab: Table) -> list[Check]:
    mean, exact, rule = U_D1_CURVES[fig]
    arr = _sigma_curves(tab)[("U_d1", "FS")]
    return _against_exact(arr, mean, exact, rule, "U_d1 FS", sampled_shape=fig in ("fig2", "fig3"))


def _verify_oscillation(tab: Table) -> list[Check]:
    depth = []
    for s in J_SIGMAS:
        v = tab.column("e_avg", {"sigma": s})
        depth.append(v.max() - v.min())
    ok = all(b < a for a, b in zip(depth, depth[1:]))
    return [Check("oscillation depth shrinks with sigma", ok, ", ".join(f"{d:.4g}" for d in depth))]


def _noise_curve(tab: Table, gate, kind, iset="FS"):
    return tab.column("e_noisy", {"gate": gate, "channel": kind, "input_set": iset})


def _verify_fig9(tables) -> list[Check]:
    summ = tables["fig9_summary"]
    mean = {(r[0], r[1]): r[2] for r in summ.rows}
    checks = [Check("noise lowers the mean",
                    mean[("DPC", 0.8)] < mean[("ADC", 0.8)] < mean[("none", 0.0)],
                    f"none {mean[('none', 0.0)]:.4g}, ADC {mean[('ADC', 0.8)]:.4g}, DPC {mean[('DPC', 0.8)]:.4g}")]
    hist = tables["fig9_hist"]
    for kind, p, *_ in summ.rows:
        total = hist.column("mass", {"channel": kind, "p": p}).sum()
        checks.append(Check(f"{kind} p={p} masses sum to 1", abs(total - 1) < 1e-12, f"{total:.12g}"))
    err = tables["fig9_error"]
    for kind in ("ADC", "DPC"):
        weak, strong = err.column("error", {"channel": kind, "p": 0.2}), err.column("error", {"channel": kind, "p": 0.8})
        frac = float(np.mean(strong > weak))
        checks.append(Check(f"{kind} errors grow with p", frac > 0.5, f"larger at p=0.8 for {frac:.1%} of gates"))
        checks.append(Check(f"{kind} errors nonnegative", bool(np.all(strong > -1e-9) and np.all(weak > -1e-9)),
                            f"min {min(strong.min(), weak.min()):.3g}"))
    return checks


def _verify_fig10(tab: Table) -> list[Check]:
    checks = []
    for gate in ("U_d2", "U_d4"):
        adc, pdc, dpc = (_noise_curve(tab, gate, k) for k in CHANNEL_KINDS)
        inner = slice(1, -1)
        checks.append(Check(f"{gate} PDC equals DPC", bool(np.max(np.abs(pdc - dpc)) <= 1e-5),
                            f"max gap {np.max(np.abs(pdc - dpc)):.3g}"))
        checks.append(Check(f"{gate} ADC above PDC for 0<p<1", bool(np.all(pdc[inner] <= adc[inner] - 1e-6)),
                            f"min margin {np.min(adc[inner] - pdc[inner]):.3g}"))
    return checks


def crossings(a, b) -> list[int]:
    """Indices ``i`` where the sign of ``a - b`` differs between ``0`` and ``i`` (ties ignored)."""
    d = np.asarray(a) - np.asarray(b)
    s0 = np.sign(d[0])
    return [i for i in range(1, len(d)) if abs(d[i]) > 1e-6 and np.sign(d[i]) == -s0]


def _verify_fig11(tab: Table) -> list[Check]:
    curves = {g: _noise_curve(tab, g, "PDC") for g in (f"U{k}" for k in range(1, 6))}
    checks = [Check("U1 above U2 at p=0", bool(curves["U1"][0] > curves["U2"][0]),
                    f"{curves['U1'][0]:.6g} vs {curves['U2'][0]:.6g}")]
    pairs = [(a, b) for a in curves for b in curves if a < b and crossings(curves[a], curves[b])]
    checks.append(Check("some pair reverses order", bool(pairs), ", ".join(f"{a}/{b}" for a, b in pairs) or "none"))
    return checks


def _verify_fig12(tab: Table) -> list[Check]:
    # over 12:3 biseparable inputs the power of U_d1^8(phi) equals the two-qubit
    # one-phase GGM power, so the BS curve has the same exact average
    c = _sigma_curves(tab)
    checks = _against_exact(c[("phi=2.4161", "BS")], 2.4161, quenched_ggm_diag1_quadrature,
                            single_interior_extremum, "phi=2.4161 BS")
    fs = c[("phi=2.4161", "FS")]
    ok, detail = non_increasing(fs[:, 1], fs[:, 2])
    return checks + [Check("phi=2.4161 FS non-increasing", ok, detail)]


def three_qubit_report(tab: Table, gate: str) -> list[Check]:
    """Crossover and robustness statements for a three-qubit noise table."""
    checks = []
    ps = tab.column("p", {"gate": gate, "channel": "ADC", "input_set": "FS"})
    inner = (ps > 0) & (ps < 1)
    for kind in CHANNEL_KINDS:
        fs, bs = _noise_curve(tab, gate, kind, "FS"), _noise_curve(tab, gate, kind, "BS")
        over = ps[inner][(fs - bs)[inner] > 1e-6]
        if kind == "DPC":
            checks.append(Check(f"{gate} DPC: FS exceeds BS at some p", over.size > 0,
                                f"max FS-BS {np.max((fs - bs)[inner]):.3g}"))
        else:
            checks.append(Check(f"{gate} {kind}: BS at or above FS", over.size == 0,
                                f"max FS-BS {np.max((fs - bs)[inner]):.3g}"))
    for iset in ("FS", "BS"):
        adc, pdc, dpc = (_noise_curve(tab, gate, k, iset) for k in CHANNEL_KINDS)
        ok = bool(np.all(adc[inner] >= pdc[inner] - 1e-6) and np.all(pdc[inner] >= dpc[inner] - 1e-6))
        checks.append(Check(f"{gate} {iset}: ADC >= PDC >= DPC (robustness)", ok,
                            f"at p=0.5: {adc[5]:.4g} / {pdc[5]:.4g} / {dpc[5]:.4g}"))
    return checks


def _verify_fig15(tab: Table) -> list[Check]:
    checks = []
    for iset in ("FS", "BS"):
        curves = {f"H{k}": _noise_curve(tab, f"H{k}", "PDC", iset) for k in range(1, 6)}
        pairs = [(a, b) for a in curves for b in curves if a < b and crossings(curves[a], curves[b])]
        checks.append(Check(f"{iset}: some pair reverses order", bool(pairs), ", ".join(f"{a}/{b}" for a, b in pairs) or "none"))
    return checks


def verify(fig: str, tables: dict[str, Table]) -> list[Check]:
    if fig in U_D1_CURVES:
        return _verify_u_d1(fig, tables[fig])
    if fig in ("fig6", "fig7", "fig8"):
        return _verify_oscillation(tables[fig])
    if fig == "fig9":
        return _verify_fig9(tables)
    if fig == "fig10":
        return _verify_fig10(tables["fig10"])
    if fig == "fig11":
        return _verify_fig11(tables["fig11"])
    if fig == "fig12":
        return _verify_fig12(tables["fig12"])
    if fig == "fig12b":
        return _verify_sigma(tables["fig12b"], non_increasing)
    if fig == "fig13":
        return three_qubit_report(tables["fig13"], "U_d1_8")
    if fig == "fig14":
        return [c for c in three_qubit_report(tables["fig14"], "P(1,7)") if "robustness" in c.name]
    if fig == "fig15":
        return _verify_fig15(tables["fig15"])
    raise KeyError(f"unknown figure {fig!r}; available: {', '.join(FIGURES)}")

