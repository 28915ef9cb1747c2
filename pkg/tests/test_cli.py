"""Command-line behavior: outputs, schemas, exit codes, determinism."""

import csv
import json

import pytest

from macgames import cli
from macgames.scenario import bundled_scenario_text


def run(argv):
    return cli.main(argv)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- analyze -----------------------------------------------------------------

def test_analyze_bundled_theorem1(tmp_path):
    out = tmp_path / "t1"
    assert run(["analyze", "theorem1", "--out", str(out), "--no-plots"]) == 0
    record = json.loads((out / "analysis.json").read_text())
    assert record["spe_class"] == "unique-undesirable"
    assert record["nash"] == [
        {
            "i": "1.6Mbps/12000b", "j": "3.2Mbps/12000b",
            "r_i_mbps": record["nash"][0]["r_i_mbps"],
            "r_j_mbps": record["nash"][0]["r_j_mbps"],
            "aggregate_mbps": record["nash"][0]["aggregate_mbps"],
            "desirable": False,
        }
    ]
    assert record["nash"][0]["aggregate_mbps"] == pytest.approx(2.08, abs=0.03)
    assert record["witness"]["player"] == "i"
    text = (out / "analysis.txt").read_text()
    assert "unique-undesirable" in text

    rows = read_csv(out / "payoffs.csv")
    assert rows[0] == ["strategy_i", "strategy_j", "r_i_mbps", "r_j_mbps",
                       "t_i_s", "t_j_s", "f_i", "f_j", "b_i", "b_j", "is_nash"]
    assert len(rows) == 5
    assert sum(r[-1] == "true" for r in rows[1:]) == 1


def test_analyze_renders_figure(tmp_path):
    out = tmp_path / "fig"
    assert run(["analyze", "theorem1", "--out", str(out)]) == 0
    assert (out / "payoffs.png").stat().st_size > 0


# -- simulate ----------------------------------------------------------------

def test_simulate_short_run(tmp_path):
    out = tmp_path / "sim"
    assert run(["simulate", "theorem1_sim", "--out", str(out), "--no-plots",
                "--set", "sim.duration_s=2"]) == 0
    rows = read_csv(out / "timeseries.csv")
    assert rows[0] == ["time_s", "node", "throughput_mbps", "share",
                       "loss_rate", "cw_min_eff", "strategy"]
    assert len(rows) == 1 + 2 * 2   # two nodes, two report intervals
    summary = json.loads((out / "summary.json").read_text())
    assert {n["name"] for n in summary["nodes"]} == {"i", "j"}
    srows = read_csv(out / "summary.csv")
    assert srows[-1][0] == "total"


def test_simulate_duration_zero_is_validation_error(tmp_path):
    code = run(["simulate", "theorem1_sim", "--out", str(tmp_path),
                "--set", "sim.duration_s=0"])
    assert code == 2


# -- sweep --------------------------------------------------------------------

def test_sweep_single_point(tmp_path):
    out = tmp_path / "sw"
    assert run(["sweep", "region_sweep", "--param", "nodes.0.channel.entries.1.success",
                "--from", "0.95", "--to", "0.95", "--steps", "1",
                "--out", str(out), "--no-plots"]) == 0
    rows = read_csv(out / "sweep.csv")
    assert rows[0][0] == "param"
    assert len(rows) == 3   # header + one grid point x two nodes
    assert rows[1][3] == "unique-undesirable"


def test_sweep_rejects_non_numeric_target(tmp_path):
    code = run(["sweep", "region_sweep", "--param", "discipline",
                "--from", "0", "--to", "1", "--steps", "2", "--out", str(tmp_path)])
    assert code == 2


def test_sweep_analyze_region(tmp_path):
    out = tmp_path / "region"
    assert run(["sweep", "region_sweep", "--param", "nodes.0.channel.entries.1.success",
                "--from", "0.85", "--to", "1.0", "--steps", "16",
                "--out", str(out), "--no-plots"]) == 0
    rows = read_csv(out / "sweep.csv")
    classes = {float(r[1]): r[3] for r in rows[1:] if r[2] == "i"}
    assert classes[0.92] == "unique-undesirable"
    assert classes[0.95] == "unique-undesirable"
    assert "unique-desirable" in set(classes.values())   # the region has a boundary


# -- exit codes ----------------------------------------------------------------

def test_missing_file_exits_2(tmp_path, capsys):
    assert run(["analyze", str(tmp_path / "missing.yaml")]) == 2
    assert "error:" in capsys.readouterr().err


def test_schema_violation_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(bundled_scenario_text("theorem1") + "unknown_field: 1\n")
    assert run(["analyze", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "unknown key" in err and "bad.yaml" in err


def test_monotonicity_violation_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(bundled_scenario_text("theorem1").replace("success: 0.95", "success: 0.4"))
    assert run(["analyze", str(bad)]) == 2
    assert "must not rise with the data rate" in capsys.readouterr().err


def test_runtime_failure_exits_1(tmp_path, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "run_sim", boom)
    assert run(["simulate", "theorem1_sim", "--out", str(tmp_path)]) == 1
    assert "runtime error" in capsys.readouterr().err


def test_empty_strategy_set_exits_2(tmp_path):
    bad = tmp_path / "empty.yaml"
    text = bundled_scenario_text("theorem1")
    text = text.replace(
        "strategies:\n"
        "  - {rate_mbps: 3.2, payload_bits: 12000}\n"
        "  - {rate_mbps: 1.6, payload_bits: 12000}",
        "strategies: []",
    )
    bad.write_text(text)
    assert run(["analyze", str(bad)]) == 2


# -- misc ------------------------------------------------------------------------

def test_scenarios_listing(capsys):
    assert run(["scenarios"]) == 0
    names = capsys.readouterr().out.split()
    assert "theorem1" in names and "dcfstar" in names
    assert run(["scenarios", "theorem2"]) == 0
    assert "edcf_stop_on_loss" in capsys.readouterr().out


def test_seed_override_changes_results(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out, seed in ((out_a, "1"), (out_b, "2")):
        assert run(["simulate", "theorem1_sim", "--out", str(out), "--no-plots",
                    "--seed", seed, "--set", "sim.duration_s=2"]) == 0
    assert (out_a / "timeseries.csv").read_bytes() != (out_b / "timeseries.csv").read_bytes()


def test_repeat_runs_are_byte_identical(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert run(["simulate", "theorem1_sim", "--out", str(out), "--no-plots",
                    "--set", "sim.duration_s=2"]) == 0
    for name in ("timeseries.csv", "summary.csv", "summary.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
