import csv
import io

import numpy as np
import pytest

from entpower.cli import ConfigError, ExperimentConfig, eval_angle, fmt, main, read_config
from entpower.figures import (
    FIGURES,
    Table,
    crossings,
    decreasing,
    increasing,
    non_increasing,
    single_interior_extremum,
    verify,
)


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_angles():
    assert eval_angle("pi/4") == pytest.approx(np.pi / 4)
    assert eval_angle("3*pi/4") == pytest.approx(3 * np.pi / 4)
    assert eval_angle("2pi") == pytest.approx(2 * np.pi)
    assert eval_angle("-pi") == pytest.approx(-np.pi)
    assert eval_angle("0.25") == 0.25


def test_config_sections_optional():
    flat = read_config("experiment = power\ngate = nl\nparams = 0.1, 0.2, 0.3  # couplings\n")
    assert flat["params"] == "0.1, 0.2, 0.3"
    flat = read_config("[run]\nexperiment = quench\n[model]\ninput-set = FS\n")
    assert flat == {"experiment": "quench", "input_set": "FS"}


@pytest.mark.parametrize(
    "mapping, key",
    [
        ({}, "experiment"),
        ({"experiment": "power"}, "gate"),
        ({"experiment": "power", "gate": "nl", "params": "0.1"}, "params"),
        ({"experiment": "noisy", "gate": "nl", "params": "0,0,0", "channel": "XYZ"}, "channel"),
        ({"experiment": "noisy", "gate": "nl", "params": "0,0,0", "channel": "ADC", "p": "1.5"}, "p"),
        ({"experiment": "quench", "gate": "nl", "params": "0,0,0", "means": "0.3"}, "tie"),
        ({"experiment": "quench", "gate": "nl", "params": "0,0,0", "means": "0.3", "sds": "1,2", "tie": "0,0,0"}, "sds"),
        ({"experiment": "power", "gate": "nl", "params": "a,b,c"}, "params"),
        ({"experiment": "reproduce", "figure": "fig99"}, "figure"),
        ({"experiment": "power", "gate": "nl", "params": "0,0,0", "restarts": "many"}, "restarts"),
        ({"experiment": "noisy", "gate": "nl", "params": "0,0,0", "channel": "ADC", "p": "0.5", "measure": "ggm"}, "measure"),
    ],
)
def test_config_errors_name_the_field(mapping, key):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_mapping(mapping)
    assert info.value.key == key
    assert f"'{key}'" in str(info.value)


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("gate = nl\n")
    assert main(["--config", str(bad), "power"]) == 2
    assert "config field" in capsys.readouterr().err


def test_power_verify_and_csv(capsys):
    assert main(["power", "--gate", "diagonal", "--params", "pi/2", "--restarts", "4", "--verify"]) == 0
    out = capsys.readouterr()
    table = rows(out.out)
    assert table[0][:3] == ["measure", "input_set", "value"]
    assert float(table[1][2]) == pytest.approx(np.sqrt(2) / 4, abs=1e-6)
    assert out.err.startswith("PASS")


def test_noisy_sweep(capsys):
    assert main(["noisy", "--gate", "nl", "--params", "0.3,0.3,0.3", "--channel", "PDC",
                 "--p", "0,0.5,1", "--targets", "0,1", "--restarts", "4", "--verify"]) == 0
    table = rows(capsys.readouterr().out)
    vals = [float(r[3]) for r in table[1:]]
    assert np.ptp(vals) < 1e-8


def test_config_file_quench(tmp_path):
    cfg = tmp_path / "q.ini"
    cfg.write_text(
        "[experiment]\nexperiment = quench\ngate = diagonal\nparams = pi/10\nmeasure = ggm\n"
        "means = pi/10\nsigmas = 0, 0.5\nrealizations = 300\nreuse_optimal_input = true\nrestarts = 4\n"
    )
    out = tmp_path / "q.csv"
    assert main(["--config", str(cfg), "--out", str(out), "quench"]) == 0
    table = rows(out.read_text())
    assert [r[0] for r in table[1:]] == ["0", "0.5"]
    assert float(table[2][1]) > float(table[1][1])


def test_outputs_are_byte_identical_across_runs_and_jobs(tmp_path):
    args = ["survey", "--n-gates", "140", "--channel", "DPC", "--p", "0.5", "--restarts", "2", "--with-error"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--out", str(a), "--jobs", "1"] + args) == 0
    assert main(["--out", str(b), "--jobs", "2"] + args) == 0
    for suffix in ("", "_summary", "_values"):
        pa, pb = (p.with_name(p.stem + suffix + ".csv") for p in (a, b))
        assert pa.read_bytes() == pb.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_number_format():
    assert fmt(0.1234567891234) == "0.123456789"
    assert fmt(3) == "3"


def test_shape_predicates():
    se = np.full(5, 0.01)
    assert increasing([0, 0.1, 0.2, 0.3, 0.4], se)[0]
    assert not increasing([0, 0.1, 0.05, 0.3, 0.4], se)[0]
    assert not increasing([0, 0.001, 0.002, 0.003, 0.004], se)[0]
    assert decreasing([0.4, 0.3, 0.2, 0.1, 0.0], se)[0]
    assert non_increasing([0.3, 0.3, 0.299, 0.2, 0.2], se)[0]
    assert not non_increasing([0.3, 0.31, 0.2, 0.1, 0.0], se)[0]
    assert not non_increasing([0.3, 0.3, 0.3, 0.3, 0.3], se)[0]
    assert single_interior_extremum([0.1, 0.3, 0.5, 0.3, 0.1], se)[0]
    assert single_interior_extremum([0.5, 0.3, 0.1, 0.3, 0.5], se)[0]
    assert not single_interior_extremum([0.1, 0.2, 0.3, 0.4, 0.5], se)[0]
    assert not single_interior_extremum([0.1, 0.5, 0.1, 0.5, 0.1], se)[0]
    assert crossings([0.5, 0.4, 0.3], [0.45, 0.42, 0.35]) == [1, 2]
    assert crossings([0.5, 0.4, 0.3], [0.45, 0.42, 0.25]) == [1]
    assert crossings([1, 1], [0, 0]) == []


def test_figure_verifier_on_synthetic_table():
    from entpower.figures import SIGMAS
    from entpower.oracles import quenched_ggm_diag1_quadrature

    tab = Table(["curve", "input_set", "sigma", "e_avg", "stderr"])
    for s in SIGMAS:
        tab.rows.append(["U_d1", "FS", float(s), quenched_ggm_diag1_quadrature(np.pi / 1.3, s), 1e-3 * (s > 0)])
    assert all(c.ok for c in verify("fig4", {"fig4": tab}))
    tab.rows[3][3] += 0.05
    assert not all(c.ok for c in verify("fig4", {"fig4": tab}))


def test_every_figure_registered():
    assert set(FIGURES) == {f"fig{k}" for k in range(2, 16)} | {"fig12b"}


def test_reproduce_small_figure(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "--restarts", "3", "reproduce", "fig10", "--verify"]) == 0
    table = rows((tmp_path / "fig10.csv").read_text())
    assert len(table) > 1
    assert "PASS" in capsys.readouterr().err
