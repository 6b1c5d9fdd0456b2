import json

import numpy as np
import pytest
from click.testing import CliRunner

from dks.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def series_csv(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.standard_normal((16, 3))
    lines = ["a,b,c"] + [",".join(f"{v:.6f}" for v in row) for row in data]
    path = tmp_path / "series.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def stamped_csv(tmp_path):
    rng = np.random.default_rng(1)
    data = rng.standard_normal((14, 2))
    lines = ["date,a,b"] + [
        f"2020-01-{i+1:02d}," + ",".join(f"{v:.6f}" for v in row)
        for i, row in enumerate(data)
    ]
    path = tmp_path / "stamped.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestScoreCommand:
    def test_json_schema(self, runner, series_csv):
        result = runner.invoke(
            main, ["score", str(series_csv), "--window", "10", "--stride", "1"]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert set(payload) == {"config", "scores"}
        assert payload["config"]["window"] == 10
        assert [s["t"] for s in payload["scores"]] == [11, 12, 13, 14, 15, 16]
        first = payload["scores"][0]
        assert set(first) == {"t", "system", "targets"}
        assert set(first["targets"]) == {"a", "b", "c"}

    def test_byte_identical_reruns(self, runner, series_csv):
        args = ["score", str(series_csv), "--window", "10"]
        out1 = runner.invoke(main, args).output
        out2 = runner.invoke(main, args).output
        assert out1 == out2

    def test_csv_output(self, runner, series_csv):
        result = runner.invoke(
            main, ["score", str(series_csv), "--window", "10", "--output", "csv"]
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "t,system,a,b,c"
        assert len(lines) == 7

    def test_timestamp_column(self, runner, stamped_csv):
        result = runner.invoke(
            main,
            ["score", str(stamped_csv), "--window", "10", "--timestamp-col"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        # first pair ends at observation 11, whose stamp is Jan 11
        assert payload["scores"][0]["t"] == "2020-01-11"

    def test_dot_kernel_flag(self, runner, series_csv):
        result = runner.invoke(
            main,
            ["score", str(series_csv), "--window", "10", "--matrix-kernel", "dot"],
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["config"]["matrix_kernel"] == "dot"

    def test_diffusion_kernel_flag(self, runner, series_csv):
        result = runner.invoke(
            main,
            [
                "score", str(series_csv),
                "--window", "10",
                "--variable-kernel", "diffusion",
                "--lambda", "0.5",
            ],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["config"]["lambda"] == 0.5
        assert all(np.isfinite(s["system"]) for s in payload["scores"])

    def test_bad_cell_fails_with_diagnostic(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n3,oops\n4,5\n")
        result = runner.invoke(main, ["score", str(path), "--window", "2"])
        assert result.exit_code != 0
        assert "row 3" in result.output

    def test_too_short_series(self, runner, series_csv):
        result = runner.invoke(main, ["score", str(series_csv)])  # default window 50
        assert result.exit_code != 0
        assert "51" in result.output

    def test_na_ffill(self, runner, tmp_path):
        path = tmp_path / "gappy.csv"
        rows = ["a,b", "1,2", "2,", "3,4", "4,5", "5,6", "6,7"]
        path.write_text("\n".join(rows) + "\n")
        result = runner.invoke(
            main, ["score", str(path), "--window", "3", "--na", "ffill"]
        )
        assert result.exit_code == 0, result.output


class TestEvalSccCommand:
    def test_single_config(self, runner):
        result = runner.invoke(
            main,
            [
                "eval-scc",
                "--trials", "2",
                "--seed", "3",
                "--variable-kernel", "covariance",
                "--matrix-kernel", "dot",
            ],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["command"] == "eval-scc"
        assert len(payload["results"]) == 1
        row = payload["results"][0]
        assert row["variable_kernel"] == "covariance"
        assert 0.0 <= row["mean_auc"] <= 1.0

    def test_csv_output(self, runner):
        result = runner.invoke(
            main,
            [
                "eval-scc",
                "--trials", "2",
                "--seed", "3",
                "--variable-kernel", "covariance",
                "--matrix-kernel", "dot",
                "--output", "csv",
            ],
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "variable_kernel,matrix_kernel,trial,auc"
        assert len(lines) == 3

    def test_half_specified_config_rejected(self, runner):
        result = runner.invoke(
            main, ["eval-scc", "--trials", "2", "--variable-kernel", "covariance"]
        )
        assert result.exit_code != 0


class TestEvalGroupsCommand:
    def test_json(self, runner):
        result = runner.invoke(main, ["eval-groups", "--trials", "2", "--seed", "1"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        settings = payload["settings"]
        assert len(settings) == 2
        assert settings[0]["groups"] == [f"group{i}" for i in range(1, 10)]
        assert settings[1]["changed_group"] == "group10"
        assert len(settings[1]["mean_scores"]) == 10

    def test_csv(self, runner):
        result = runner.invoke(
            main, ["eval-groups", "--trials", "2", "--seed", "1", "--output", "csv"]
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "setting,group,trial,score"
        assert len(lines) == 1 + 2 * 9 + 2 * 10


class TestOracleKlCommand:
    def test_json(self, runner):
        result = runner.invoke(
            main,
            ["oracle-kl", "--trials", "2", "--samples", "2000", "--seed", "1"],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert len(payload["pairs"]) == 2
        assert isinstance(payload["all_within_3se"], bool)

    def test_csv(self, runner):
        result = runner.invoke(
            main,
            [
                "oracle-kl",
                "--trials", "2",
                "--samples", "2000",
                "--seed", "1",
                "--output", "csv",
            ],
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0].startswith("pair,dim,target_size")
        assert len(lines) == 3
