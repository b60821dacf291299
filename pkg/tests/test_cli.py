"""Tests for CLI commands."""

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from tencomp import DivergenceError, InitializationError, __version__
from tencomp.cli import main as cli_main
from tencomp.cli.main import cli
from tencomp.loader import (
    read_factors,
    read_observations,
    write_asym_factors,
    write_asym_observations,
    write_factors,
    write_observations,
)
from tencomp.operations.asym import sample_asym_observations


@pytest.fixture
def runner():
    """Create a CLI test runner."""
    return CliRunner()


@pytest.fixture
def exact_instance(tmp_path, full_obs, orthogonal_factors):
    """Observation directory and truth for the fully observed orthogonal tensor."""
    write_observations(full_obs, tmp_path / "inst")
    write_factors(orthogonal_factors, tmp_path / "inst" / "Ustar.csv")
    return tmp_path / "inst"


@pytest.fixture
def sweep_config(tmp_path):
    path = tmp_path / "phase.json"
    path.write_text(json.dumps({"kind": "phase", "d": 8, "r": 2, "p_grid": [1.0], "trials": 2, "t0": 3, "t_init": 1}))
    return path


class TestGlobalOptions:
    """Tests for the command group."""

    def test_version(self, runner):
        """--version prints the package version."""
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_help_lists_commands(self, runner):
        """--help lists every subcommand."""
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        for name in ("gen", "complete", "eval", "experiment", "tpm-compare", "asym-gen", "asym-complete", "asym-experiment"):
            assert name in result.output

    def test_bad_log_level(self, runner):
        """An unknown log level is a usage error."""
        result = runner.invoke(cli, ["--log-level", "LOUD", "eval", "--out", "run", "--truth", "Ustar.csv"])
        assert result.exit_code == 2


class TestGenCommand:
    """Tests for gen."""

    def test_full_sampling_manifest(self, runner, tmp_path):
        """p=1 at d=10 observes all 220 canonical triples."""
        result = runner.invoke(cli, ["gen", "--d", "10", "--r", "2", "--p", "1", "--out", str(tmp_path / "inst")])
        assert result.exit_code == 0, result.output
        manifest = json.loads((tmp_path / "inst" / "manifest.json").read_text())
        assert manifest["num_canonical"] == 220
        assert read_observations(tmp_path / "inst").num_canonical == 220
        assert read_factors(tmp_path / "inst" / "Ustar.csv").shape == (10, 2)

    def test_same_seed_byte_identical(self, runner, tmp_path):
        """Two runs with one seed write identical files."""
        for name in ("a", "b"):
            args = ["gen", "--d", "6", "--r", "2", "--p", "0.4", "--sigma", "0.1", "--seed", "3", "--out", str(tmp_path / name)]
            assert runner.invoke(cli, args).exit_code == 0
        for name in ("manifest.json", "entries.csv", "Ustar.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_invalid_rate(self, runner, tmp_path):
        """p outside (0, 1] exits with code 4."""
        result = runner.invoke(cli, ["gen", "--d", "6", "--r", "2", "--p", "1.5", "--out", str(tmp_path / "x")])
        assert result.exit_code == 4
        assert "sampling rate" in result.output


class TestCompleteCommand:
    """Tests for complete and eval."""

    def test_exact_instance_succeeds(self, runner, exact_instance, tmp_path):
        """End to end on an exact instance: files written and success reported."""
        out = tmp_path / "run"
        result = runner.invoke(
            cli,
            ["complete", "--obs", str(exact_instance), "--r", "3", "--L", "64", "--init-restarts", "2",
             "--iters", "10", "--seed", "1", "--out", str(out), "--truth", str(exact_instance / "Ustar.csv")],
        )
        assert result.exit_code == 0, result.output
        for name in ("U.csv", "U0.csv", "trace.csv", "metrics.json"):
            assert (out / name).exists()
        assert json.loads((out / "metrics.json").read_text())["success"] is True
        assert len(pd.read_csv(out / "trace.csv")) == 11
        assert "gd_run" in result.output

    def test_zero_iterations_writes_initialization(self, runner, exact_instance, tmp_path):
        """--iters 0 leaves U.csv equal to the initialization."""
        out = tmp_path / "run"
        result = runner.invoke(
            cli, ["complete", "--obs", str(exact_instance), "--L", "64", "--iters", "0", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert (out / "U.csv").read_bytes() == (out / "U0.csv").read_bytes()
        assert not (out / "metrics.json").exists()

    def test_rank_defaults_to_manifest(self, runner, exact_instance, tmp_path):
        """Without --r the manifest's r_hint is used."""
        out = tmp_path / "run"
        result = runner.invoke(cli, ["complete", "--obs", str(exact_instance), "--L", "64", "--iters", "1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert read_factors(out / "U.csv").shape == (8, 3)

    def test_missing_observations(self, runner, tmp_path):
        """A missing observation directory exits with code 4."""
        result = runner.invoke(cli, ["complete", "--obs", str(tmp_path / "nope"), "--r", "2", "--out", str(tmp_path / "run")])
        assert result.exit_code == 4
        assert "not found" in result.output

    def test_malformed_observations(self, runner, exact_instance, tmp_path):
        """A corrupt entries file exits with code 4."""
        (exact_instance / "entries.csv").write_text("i,j,k,value\n0,0,zero,1.0\n")
        result = runner.invoke(cli, ["complete", "--obs", str(exact_instance), "--r", "2", "--out", str(tmp_path / "run")])
        assert result.exit_code == 4

    def test_init_failure_exit_code(self, runner, exact_instance, tmp_path, monkeypatch):
        """Initialization failure exits with code 2."""

        def fail(*args, **kwargs):
            raise InitializationError("best_of_restarts failed: all 5 restarts failed.", found=1)

        monkeypatch.setattr(cli_main, "complete_symmetric", fail)
        result = runner.invoke(cli, ["complete", "--obs", str(exact_instance), "--out", str(tmp_path / "run")])
        assert result.exit_code == 2
        assert "initialization failed" in result.output

    def test_divergence_exit_code(self, runner, exact_instance, tmp_path, monkeypatch):
        """Divergence exits with code 3."""

        def fail(*args, **kwargs):
            raise DivergenceError("gd_run failed: iterate 4 has non-finite entries.", iteration=4)

        monkeypatch.setattr(cli_main, "complete_symmetric", fail)
        result = runner.invoke(cli, ["complete", "--obs", str(exact_instance), "--out", str(tmp_path / "run")])
        assert result.exit_code == 3

    def test_eval(self, runner, exact_instance, orthogonal_factors, tmp_path):
        """eval scores OUT/U.csv against the truth and writes metrics.json."""
        out = tmp_path / "run"
        write_factors(orthogonal_factors[:, ::-1], out / "U.csv")
        result = runner.invoke(cli, ["eval", "--out", str(out), "--truth", str(exact_instance / "Ustar.csv")])
        assert result.exit_code == 0, result.output
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["success"] is True
        assert metrics["dist_f"] == 0.0


class TestExperimentCommands:
    """Tests for experiment, tpm-compare and asym-experiment."""

    def test_experiment_writes_tables(self, runner, sweep_config, tmp_path):
        """experiment writes rows, aggregate and timings."""
        out = tmp_path / "sweep"
        result = runner.invoke(cli, ["experiment", "--config", str(sweep_config), "--out", str(out), "--threads", "2"])
        assert result.exit_code == 0, result.output
        rows = pd.read_csv(out / "rows.csv")
        assert len(rows) == 2
        assert (out / "aggregate.csv").exists()
        assert (out / "timings.csv").exists()
        assert "wall_ms" not in rows.columns

    def test_tpm_compare_pairs_methods(self, runner, sweep_config, tmp_path):
        """tpm-compare emits matched row counts per method."""
        out = tmp_path / "sweep"
        result = runner.invoke(cli, ["tpm-compare", "--config", str(sweep_config), "--out", str(out)])
        assert result.exit_code == 0, result.output
        counts = pd.read_csv(out / "rows.csv").groupby("method").size()
        assert counts["spectral"] == counts["tpm"] == 2

    def test_bad_config(self, runner, tmp_path):
        """A schema violation exits with code 4."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"kind": "phase", "trials": 0}))
        result = runner.invoke(cli, ["experiment", "--config", str(path), "--out", str(tmp_path / "o")])
        assert result.exit_code == 4
        assert "trials" in result.output

    def test_missing_config(self, runner, tmp_path):
        """A missing config file exits with code 4."""
        result = runner.invoke(cli, ["experiment", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "o")])
        assert result.exit_code == 4

    def test_asym_experiment_rejects_symmetric_kind(self, runner, sweep_config, tmp_path):
        """asym-experiment needs kind asym-convergence."""
        result = runner.invoke(cli, ["asym-experiment", "--config", str(sweep_config), "--out", str(tmp_path / "o")])
        assert result.exit_code == 4
        assert "asym-convergence" in result.output

    def test_tpm_compare_rejects_asym_kind(self, runner, tmp_path):
        """tpm-compare needs a symmetric kind."""
        path = tmp_path / "asym.json"
        path.write_text(json.dumps({"kind": "asym-convergence", "dims": [5, 6, 7], "r": 2, "trials": 1}))
        result = runner.invoke(cli, ["tpm-compare", "--config", str(path), "--out", str(tmp_path / "o")])
        assert result.exit_code == 4


class TestAsymCommands:
    """Tests for asym-gen and asym-complete."""

    def test_asym_gen(self, runner, tmp_path):
        """asym-gen writes observations and a truth directory."""
        out = tmp_path / "inst"
        result = runner.invoke(cli, ["asym-gen", "--d", "4,5,6", "--r", "2", "--p", "0.5", "--seed", "2", "--out", str(out)])
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "manifest.json").read_text())
        assert (manifest["d1"], manifest["d2"], manifest["d3"]) == (4, 5, 6)
        assert read_factors(out / "truth" / "W.csv").shape == (6, 2)

    @pytest.mark.parametrize("dims", ["4,5", "4,x,6", "0,5,6"])
    def test_asym_gen_bad_dims(self, runner, tmp_path, dims):
        """Malformed --d is a usage error."""
        result = runner.invoke(cli, ["asym-gen", "--d", dims, "--r", "2", "--p", "0.5", "--out", str(tmp_path / "x")])
        assert result.exit_code == 2

    def test_asym_complete_exact(self, runner, orthogonal_asym_factors, tmp_path):
        """asym-complete recovers fully observed orthogonal factors."""
        obs = sample_asym_observations(orthogonal_asym_factors, p=1.0, sigma=0.0, seed=0)
        write_asym_observations(obs, tmp_path / "inst")
        write_asym_factors(orthogonal_asym_factors, tmp_path / "inst" / "truth")
        out = tmp_path / "run"
        result = runner.invoke(
            cli,
            ["asym-complete", "--obs", str(tmp_path / "inst"), "--r", "2", "--L", "32", "--iters", "5",
             "--seed", "1", "--out", str(out), "--truth", str(tmp_path / "inst" / "truth")],
        )
        assert result.exit_code == 0, result.output
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["success"] is True
        assert read_factors(out / "V.csv").shape == (6, 2)
        assert np.isfinite(pd.read_csv(out / "trace.csv")["loss"]).all()
