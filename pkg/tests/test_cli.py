"""Tests for CLI interface."""

import json
import subprocess
import sys

import click
import numpy as np
import pytest
from click.testing import CliRunner

from pess_solver import __version__
from pess_solver.bench import harness, store
from pess_solver.cli import DURATION, INT_LIST, cli
from pess_solver.packing.exceptions import InfeasibleSolutionError
from pess_solver.packing.models import Layout, Solution
from pess_solver.packing.pipeline import SolveResult

R4 = np.sqrt(6.0) / 2.0 + 1.0


@pytest.fixture
def runner(tmp_path, monkeypatch):
    """CliRunner with the configuration file redirected into tmp_path."""
    monkeypatch.setenv("PESS_SOLVER_CONFIG", str(tmp_path / "config.json"))
    return CliRunner()


@pytest.fixture
def solution_files(tmp_path, tetrahedron):
    good = store.write_solution(tmp_path / "good.txt", Solution(Layout(tetrahedron), R4 + 1e-12))
    bad = store.write_solution(tmp_path / "bad.txt", Solution(Layout([[-0.9, 0, 0], [0.9, 0, 0]]), 2.0))
    broken = tmp_path / "broken.txt"
    broken.write_text("2 2.0\n0 0 0\n")
    return good, bad, broken


def test_cli_help(runner):
    """Test CLI help command."""
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    assert "Usage:" in result.output
    assert "pess-solver" in result.output
    for command in ("solve", "verify", "anm-exp", "compare", "config"):
        assert command in result.output


def test_cli_version(runner):
    """Test CLI version command."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_cli_subprocess():
    """Test CLI via subprocess."""
    result = subprocess.run(
        [sys.executable, "-m", "pess_solver.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "Usage:" in result.stdout


class TestParamTypes:
    """Custom click parameter types."""

    @pytest.mark.parametrize("text,seconds", [("90", 90.0), ("30s", 30.0), ("5m", 300.0), ("2h", 7200.0), ("1.5M", 90.0)])
    def test_duration(self, text, seconds):
        assert DURATION.convert(text, None, None) == seconds

    @pytest.mark.parametrize("text", ["abc", "0", "-5m", "h"])
    def test_bad_duration(self, text):
        with pytest.raises(click.BadParameter):
            DURATION.convert(text, None, None)

    def test_int_list(self):
        assert INT_LIST.convert("50, 100,200", None, None) == [50, 100, 200]

    @pytest.mark.parametrize("text", ["a,b", ","])
    def test_bad_int_list(self, text):
        with pytest.raises(click.BadParameter):
            INT_LIST.convert(text, None, None)


class TestVerify:
    """Exit codes of the verify command."""

    def test_feasible(self, runner, solution_files):
        good, _, _ = solution_files
        result = runner.invoke(cli, ["verify", str(good), "--tol", "1e-9"])
        assert result.exit_code == 0
        assert "FEASIBLE" in result.output
        assert "n = 4" in result.output

    def test_infeasible(self, runner, solution_files):
        _, bad, _ = solution_files
        result = runner.invoke(cli, ["verify", str(bad)])
        assert result.exit_code == 1
        assert "INFEASIBLE" in result.output
        assert "pair (1, 2)" in result.output

    def test_parse_error(self, runner, solution_files):
        _, _, broken = solution_files
        result = runner.invoke(cli, ["verify", str(broken)])
        assert result.exit_code == 2
        assert "broken.txt:2" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["verify", str(tmp_path / "absent.txt")])
        assert result.exit_code == 2


class TestCompare:
    """Record comparison command."""

    def test_tally_and_density(self, runner, tmp_path):
        summary = tmp_path / "summary.csv"
        for n, r in [(1, 1.0), (2, 1.9), (3, 2.5)]:
            record = harness.aggregate(n, [_result(n, r)])
            store.append_summary(summary, record)
        records = store.write_records(tmp_path / "records.csv", {1: 1.0, 2: 2.0, 3: 2.2, 4: R4})
        density = tmp_path / "density.csv"

        result = runner.invoke(
            cli,
            ["compare", "--summary", str(summary), "--records", str(records), "--density-out", str(density)],
        )
        assert result.exit_code == 0
        assert "#Improved 1  #Equal 1  #Worse 1  #Absent 1" in result.output
        assert density.read_text().splitlines()[0] == "n,density_best,density_record"

    def test_bad_summary(self, runner, tmp_path):
        summary = tmp_path / "summary.csv"
        summary.write_text("n,r_best\n2,2.0\n")
        records = store.write_records(tmp_path / "records.csv", {2: 2.0})
        result = runner.invoke(cli, ["compare", "--summary", str(summary), "--records", str(records)])
        assert result.exit_code == 2
        assert "missing columns" in result.output


class TestConfigCommand:
    """Persisted defaults."""

    def test_init_and_show(self, runner, tmp_path):
        path = tmp_path / "custom.json"
        result = runner.invoke(cli, ["config", "--init", "--file", str(path)])
        assert result.exit_code == 0
        assert json.loads(path.read_text())["runs"] == 3

        result = runner.invoke(cli, ["config", "--show", "--file", str(path)])
        assert result.exit_code == 0
        assert '"policy": "adaptive"' in result.output

    def test_set_uses_environment_path(self, runner, tmp_path):
        result = runner.invoke(cli, ["config", "--set", "runs", "10", "--set", "policy", "brute"])
        assert result.exit_code == 0
        data = json.loads((tmp_path / "config.json").read_text())
        assert data["runs"] == 10
        assert data["policy"] == "every-iteration"

    def test_set_unknown_key_warns(self, runner):
        result = runner.invoke(cli, ["config", "--set", "colour", "blue"])
        assert result.exit_code == 0
        assert "Unknown configuration key" in result.output

    def test_set_bad_value(self, runner):
        result = runner.invoke(cli, ["config", "--set", "runs", "many"])
        assert result.exit_code == 2
        assert "Invalid value for 'runs'" in result.output


class TestAnmCommand:
    def test_rejects_single_sphere(self, runner):
        result = runner.invoke(cli, ["anm-exp", "--n-list", "1,10"])
        assert result.exit_code == 2

    def test_small_experiment(self, runner, tmp_path):
        out = tmp_path / "anm.csv"
        result = runner.invoke(
            cli, ["anm-exp", "--n-list", "8,12", "--runs", "1", "--seed", "3", "--out", str(out)]
        )
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(store.ANM_COLUMNS)
        assert len(lines) == 3


class TestSolveCommand:
    """The solve command."""

    def test_infeasible_exit_code(self, runner, tmp_path, monkeypatch):
        def fail(*args, **kwargs):
            raise InfeasibleSolutionError("no feasible packing")

        monkeypatch.setattr(harness, "run_instance", fail)
        result = runner.invoke(cli, ["solve", "--n", "3", "--time", "1", "--seed", "1", "--out", str(tmp_path)])
        assert result.exit_code == 1
        assert "no feasible packing" in result.output

    def test_bad_records_file(self, runner, tmp_path):
        records = tmp_path / "records.csv"
        records.write_text("n,radius\n2,x\n")
        result = runner.invoke(cli, ["solve", "--n", "2", "--records", str(records)])
        assert result.exit_code == 2

    @pytest.mark.integration
    def test_small_instance(self, runner, tmp_path):
        records = store.write_records(tmp_path / "records.csv", {2: 2.0})
        out = tmp_path / "results"
        result = runner.invoke(
            cli,
            [
                "solve", "--n", "2", "--time", "10m", "--runs", "2", "--seed", "42",
                "--max-rounds", "1", "--s-iter", "20", "--records", str(records), "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "R_best = " in result.output
        assert "RR = " in result.output
        assert (out / "pess_n0002_run00.txt").exists()
        assert (out / "pess_n0002_run01.txt").exists()
        (row,) = store.read_summary(out / "summary.csv")
        assert row.r_best == pytest.approx(2.0, abs=1e-6)


def _result(n, radius):
    centers = np.zeros((n, 3))
    centers[:, 0] = np.linspace(-(radius - 1.0), radius - 1.0, n)
    return SolveResult(
        best=Solution(Layout(centers), radius),
        best_radius=radius,
        iterations=0,
        elapsed=1.0,
        time_to_best=1.0,
        seed=0,
        feasible=True,
    )
