from __future__ import annotations

import csv
import json
import shutil
from pathlib import Path

import pytest

from tnrisk.cli import main
from tnrisk.dataset import bundled_data_dir


def run(*argv: str) -> int:
    return main(list(argv))


def read_csv(path: Path) -> list[dict]:
    with path.open(newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestValidate:
    def test_bundled_ok(self, tmp_path, capsys):
        assert run("validate", "--out", str(tmp_path)) == 0
        assert (tmp_path / "validation_report.txt").read_text() == ""
        assert "ok" in capsys.readouterr().out

    def test_missing_dir_exit_2(self, tmp_path, capsys):
        assert run("validate", "--data", str(tmp_path / "nope"), "--out", str(tmp_path)) == 2

    def test_broken_bundle_exit_1(self, tmp_path, capsys):
        data = tmp_path / "data"
        shutil.copytree(bundled_data_dir(), data)
        mig = data / "migration.csv"
        mig.write_text(mig.read_text() + "ZZZ,USA,500\n")
        assert run("validate", "--data", str(data), "--out", str(tmp_path / "out")) == 1
        report = (tmp_path / "out" / "validation_report.txt").read_text()
        assert "ZZZ" in report


class TestSolve:
    def test_baseline_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run("solve", "--out", str(out)) == 0
        for name in ("attack_matrix.csv", "attack_matrix.json", "abandoned.csv",
                     "target_totals.csv", "plot_data.csv", "run_metadata.json"):
            assert (out / name).is_file(), name
        rows = read_csv(out / "target_totals.csv")
        totals = {r["target"]: float(r["expected_plots"]) for r in rows}
        grand = totals.pop("TOTAL")
        assert grand == pytest.approx(sum(totals.values()))
        assert max(totals, key=totals.get) == "USA"
        assert "top target USA" in capsys.readouterr().out

    def test_metadata_echo(self, tmp_path):
        out = tmp_path / "out"
        run("solve", "--out", str(out), "--lambda", "0.2", "--abandon", "-30")
        meta = json.loads((out / "run_metadata.json").read_text())
        assert meta["config"]["lambda"] == 0.2
        assert meta["config"]["abandon"] == -30.0
        assert meta["params"]["lambda"] == 0.2

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run("solve", "--out", str(a))
        run("solve", "--out", str(b))
        for name in ("attack_matrix.csv", "attack_matrix.json", "target_totals.csv",
                     "plot_data.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_estimate_mode_close_to_pre(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run("solve", "--out", str(a), "--mode", "pre")
        run("solve", "--out", str(b), "--mode", "estimate")
        ta = {r["target"]: float(r["expected_plots"]) for r in read_csv(a / "target_totals.csv")}
        tb = {r["target"]: float(r["expected_plots"]) for r in read_csv(b / "target_totals.csv")}
        assert ta["TOTAL"] == pytest.approx(tb["TOTAL"], rel=0.05)
        assert max(ta, key=lambda t: ta[t] if t != "TOTAL" else -1) == \
            max(tb, key=lambda t: tb[t] if t != "TOTAL" else -1)

    def test_bad_weights_exit_2(self, tmp_path, capsys):
        assert run("solve", "--out", str(tmp_path), "--weights", "0.5,0.25") == 2


class TestEstimate:
    def test_writes_tables(self, tmp_path):
        out = tmp_path / "out"
        assert run("estimate", "--out", str(out)) == 0
        for name in ("supply.csv", "barriers.csv", "interception.csv",
                     "yield.csv", "run_metadata.json"):
            assert (out / name).is_file(), name


class TestScenario:
    def test_fortress_builtin(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run("scenario", "fortress-USA", "--out", str(out)) == 0
        gainers = read_csv(out / "ranked_gainers.csv")
        assert gainers[0]["target"] == "JPN"
        alt = read_csv(out / "alt_attack_matrix.csv")
        for r in alt:
            if r["target"] == "USA":
                assert r["source"] == "USA"

    def test_homegrown_builtin(self, tmp_path):
        out = tmp_path / "out"
        assert run("scenario", "homegrown", "--out", str(out)) == 0
        alt = read_csv(out / "alt_attack_matrix.csv")
        assert all(r["source"] == r["target"] for r in alt)

    def test_json_spec(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "name": "close-france",
            "barrier_overrides": [["*", "FRA", "inf"]],
        }))
        out = tmp_path / "out"
        assert run("scenario", str(spec), "--out", str(out)) == 0
        alt = read_csv(out / "alt_attack_matrix.csv")
        for r in alt:
            if r["target"] == "FRA":
                assert r["source"] == "FRA"

    def test_unknown_code_exit_1(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"barrier_overrides": [["*", "ZZZ", "inf"]]}))
        assert run("scenario", str(spec), "--out", str(tmp_path / "out")) == 1

    def test_missing_spec_exit_2(self, tmp_path):
        assert run("scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)) == 2


class TestSweep:
    def test_bundled_threshold(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run("sweep", "--out", str(out),
                   "--a-min", "-60", "--a-max", "10", "--step", "2") == 0
        meta = json.loads((out / "run_metadata.json").read_text())
        assert -54.0 < meta["threshold"] < -6.8
        rows = read_csv(out / "sweep.csv")
        totals = [float(r["total_attacks"]) for r in rows]
        assert totals == sorted(totals)
        assert "USA" in rows[0]  # per-target columns present

    def test_bad_grid_exit_2(self, tmp_path):
        assert run("sweep", "--out", str(tmp_path), "--a-min", "5", "--a-max", "-5") == 2


def test_console_script_installed():
    assert shutil.which("tnrisk") is not None
