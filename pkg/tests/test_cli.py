"""CLI behaviour via click's test runner."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from bayespower.cli import main
from tests.conftest import preset_dict

runner = CliRunner()


@pytest.fixture
def small_spec_file(tmp_path):
    path = tmp_path / "design.json"
    path.write_text(json.dumps(preset_dict("bernoulli-setting-1a", m=64)))
    return str(path)


class TestCurveCommand:
    def test_outputs_recommendation(self, small_spec_file, tmp_path):
        out = tmp_path / "out.json"
        csv = tmp_path / "out.csv"
        res = runner.invoke(
            main, ["curve", "--spec", small_spec_file, "--out", str(out), "--csv", str(csv)]
        )
        assert res.exit_code == 0, res.output
        summary = json.loads(res.output)
        assert summary["recommendation"] >= 2
        doc = json.loads(out.read_text())
        assert len(doc["roots"]) == 64
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "n,power"
        assert len(lines) == 201

    def test_seed_override_is_deterministic(self, small_spec_file):
        a = runner.invoke(main, ["curve", "--spec", small_spec_file, "--seed", "7"])
        b = runner.invoke(main, ["curve", "--spec", small_spec_file, "--seed", "7"])
        assert a.exit_code == 0 and b.exit_code == 0
        assert a.output == b.output

    def test_malformed_spec_fails_with_diagnostics(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        res = runner.invoke(main, ["curve", "--spec", str(bad)])
        assert res.exit_code != 0
        assert "JSON" in res.output

    def test_missing_file(self):
        res = runner.invoke(main, ["curve", "--spec", "/nonexistent.json"])
        assert res.exit_code != 0
        assert "not found" in res.output

    def test_degraded_run_exits_two(self, tmp_path):
        doc = preset_dict("bernoulli-setting-1a", m=64, n_max=50.0)
        path = tmp_path / "clamped.json"
        path.write_text(json.dumps(doc))
        res = runner.invoke(main, ["curve", "--spec", str(path)])
        assert res.exit_code == 2
        assert "unattainable" in res.output

    def test_parallel_output_matches_serial(self, small_spec_file, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        r1 = runner.invoke(main, ["curve", "--spec", small_spec_file, "--out", str(out1)])
        r2 = runner.invoke(
            main,
            ["curve", "--spec", small_spec_file, "--out", str(out2), "--parallelism", "4"],
        )
        assert r1.exit_code == 0 and r2.exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestVerifyCommand:
    def test_rows_match_grid(self, small_spec_file, tmp_path):
        out = tmp_path / "oracle.csv"
        res = runner.invoke(
            main,
            [
                "verify",
                "--spec",
                small_spec_file,
                "--n-grid",
                "100:300:100",
                "--reps",
                "100",
                "--out",
                str(out),
            ],
        )
        assert res.exit_code == 0, res.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n,power,ci_lo,ci_hi"
        assert len(lines) == 4  # header + three grid rows

    def test_low_reps_rejected(self, small_spec_file):
        res = runner.invoke(
            main, ["verify", "--spec", small_spec_file, "--n-grid", "100:200:100", "--reps", "50"]
        )
        assert res.exit_code != 0

    def test_csv_first_columns_align_with_curve_format(self, small_spec_file, tmp_path):
        curve_csv = tmp_path / "c.csv"
        oracle_csv = tmp_path / "o.csv"
        runner.invoke(main, ["curve", "--spec", small_spec_file, "--csv", str(curve_csv)])
        runner.invoke(
            main,
            ["verify", "--spec", small_spec_file, "--n-grid", "100:200:100", "--reps", "100", "--out", str(oracle_csv)],
        )
        curve_header = curve_csv.read_text().splitlines()[0].split(",")
        oracle_header = oracle_csv.read_text().splitlines()[0].split(",")
        assert oracle_header[:2] == curve_header


class TestVarianceStudyCommand:
    def test_table_columns_and_determinism(self, small_spec_file):
        args = [
            "variance-study",
            "--spec",
            small_spec_file,
            "--m",
            "256",
            "--reps",
            "50",
            "--n-grid",
            "300",
        ]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == 0, a.output
        header = a.output.strip().splitlines()[0]
        assert header == "n,sobol_sd,prng_sd,sobol_mean,prng_mean"
        assert a.output == b.output
