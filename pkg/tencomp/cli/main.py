"""Main CLI entry point for tencomp."""
from __future__ import annotations

import json
import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import click

from .. import __version__
from ..config import configure, get_config
from ..display import summary, trace_summary
from ..experiments import ExperimentConfig, load_config, run_experiment
from ..loader import (
    read_asym_factors,
    read_asym_observations,
    read_factors,
    read_observations,
    write_asym_factors,
    write_asym_observations,
    write_factors,
    write_frame,
    write_metrics,
    write_observations,
)
from ..operations._validation import (
    ConvergenceError,
    DivergenceError,
    ExperimentConfigError,
    InitializationError,
    ObservationParseError,
)
from ..operations.asym import DEFAULT_ASYM_ETA, asym_metrics_record, gen_asym_factors, sample_asym_observations
from ..operations.initialization import DEFAULT_EPS_TH, DEFAULT_L, DEFAULT_T_INIT
from ..operations.metrics import DEFAULT_SUCCESS_THRESHOLD, metrics_record
from ..operations.sampling import gen_factors, sample_observations
from ..pipeline import DEFAULT_ETA, DEFAULT_ITERS, complete_asym, complete_symmetric
from ..session import RunSession

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INIT_FAILURE = 2
EXIT_DIVERGENCE = 3
EXIT_IO = 4


@contextmanager
def _exit_codes(command: str) -> Iterator[None]:
    """Map library failures onto the documented exit codes."""
    try:
        yield
    except (InitializationError, ConvergenceError) as e:
        click.echo(f"{command}: initialization failed: {e}", err=True)
        sys.exit(EXIT_INIT_FAILURE)
    except DivergenceError as e:
        click.echo(f"{command}: gradient descent diverged: {e}", err=True)
        sys.exit(EXIT_DIVERGENCE)
    except FileNotFoundError as e:
        click.echo(f"{command}: file not found: {e}", err=True)
        sys.exit(EXIT_IO)
    except (ObservationParseError, ExperimentConfigError) as e:
        click.echo(f"{command}: {e}", err=True)
        sys.exit(EXIT_IO)
    except (OSError, ValueError) as e:
        click.echo(f"{command}: {e}", err=True)
        sys.exit(EXIT_IO)


def _parse_dims(ctx: click.Context, param: click.Parameter, value: str) -> tuple[int, int, int]:
    try:
        dims = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected three comma-separated integers, got {value!r}") from None
    if len(dims) != 3 or min(dims) < 1:
        raise click.BadParameter(f"expected three positive integers d1,d2,d3, got {value!r}")
    return dims  # type: ignore[return-value]


@click.group()
@click.version_option(version=__version__, prog_name="tencomp")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
    help="Logging level. Defaults to TENCOMP_LOG_LEVEL or WARNING.",
)
def cli(log_level: str | None):
    """tencomp - Low-rank tensor completion by spectral initialization and gradient descent.

    Exit codes: 0 success, 2 initialization failure (also click usage errors),
    3 gradient descent divergence, 4 I/O, parse or configuration error.
    """
    try:
        configure(log_level=log_level)
    except ValueError as e:
        click.echo(f"Invalid configuration: {e}", err=True)
        sys.exit(EXIT_IO)
    logging.basicConfig(
        level=get_config().log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.option("--d", "d", type=int, required=True, help="Tensor dimension.")
@click.option("--r", "r", type=int, required=True, help="CP rank of the ground truth.")
@click.option("--p", "p", type=float, required=True, help="Sampling rate in (0, 1].")
@click.option("--sigma", type=float, default=0.0, show_default=True, help="Noise standard deviation.")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output directory.")
def gen(d: int, r: int, p: float, sigma: float, seed: int, out: Path):
    """
    Generate a random symmetric instance.

    Writes manifest.json and entries.csv (the observations) and Ustar.csv
    (the ground-truth factors) into OUT.

    Example:
        tencomp gen --d 100 --r 4 --p 0.1 --seed 7 --out inst
    """
    with _exit_codes("gen"):
        Ustar = gen_factors(d, r, seed)
        obs = sample_observations(Ustar, p, sigma, seed)
        write_observations(obs, out)
        write_factors(Ustar, out / "Ustar.csv")
    click.echo(f"Generated d={d} r={r}: {obs.num_canonical} observed entries -> {out}")


@cli.command()
@click.option("--obs", "obs_dir", type=click.Path(path_type=Path), required=True, help="Observation directory.")
@click.option("--r", "r", type=int, default=None, help="Target rank. Defaults to the manifest's r_hint.")
@click.option("--L", "L", type=int, default=DEFAULT_L, show_default=True, help="Retrieval trials per restart.")
@click.option("--eps-th", type=float, default=DEFAULT_EPS_TH, show_default=True, help="Pruning threshold.")
@click.option("--init-restarts", type=int, default=DEFAULT_T_INIT, show_default=True, help="Initialization restarts.")
@click.option("--eta", type=float, default=DEFAULT_ETA, show_default=True, help="Dimensionless stepsize.")
@click.option("--iters", type=int, default=DEFAULT_ITERS, show_default=True, help="Gradient descent iterations.")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output directory.")
@click.option("--truth", type=click.Path(path_type=Path), default=None, help="Ground-truth factor CSV.")
@click.option("--success-threshold", type=float, default=DEFAULT_SUCCESS_THRESHOLD, show_default=True)
def complete(
    obs_dir: Path,
    r: int | None,
    L: int,
    eps_th: float,
    init_restarts: int,
    eta: float,
    iters: int,
    seed: int,
    out: Path,
    truth: Path | None,
    success_threshold: float,
):
    """
    Complete a symmetric tensor from an observation directory.

    Writes U.csv, U0.csv and trace.csv to OUT, plus metrics.json when
    --truth is given, and prints the stage summary.

    Example:
        tencomp complete --obs inst --r 4 --out run --truth inst/Ustar.csv
    """
    with _exit_codes("complete"):
        obs = read_observations(obs_dir)
        rank = r if r is not None else obs.r_hint
        if rank is None:
            raise ValueError("no --r given and the manifest has no r_hint")
        Ustar = read_factors(truth) if truth is not None else None

        with RunSession() as session:
            run = complete_symmetric(
                obs,
                rank,
                L=L,
                eps_th=eps_th,
                t_init=init_restarts,
                eta=eta,
                t0=iters,
                seed=seed,
                truth=Ustar,
            )

        write_factors(run.U, out / "U.csv")
        write_factors(run.U0, out / "U0.csv")
        trace = run.trace.to_frame()
        write_frame(trace, out / "trace.csv")
        if Ustar is not None:
            write_metrics(dict(metrics_record(run.U, Ustar, success_threshold)), out / "metrics.json")

    click.echo(summary(session).to_string(index=False))
    click.echo("")
    click.echo(trace_summary(trace).to_string(index=False))
    click.echo(f"\nFinal loss {run.trace.final_loss:.6e}; results in {out}")


@cli.command(name="eval")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Run directory holding U.csv.")
@click.option("--truth", type=click.Path(path_type=Path), required=True, help="Ground-truth factor CSV.")
@click.option("--success-threshold", type=float, default=DEFAULT_SUCCESS_THRESHOLD, show_default=True)
def evaluate(out: Path, truth: Path, success_threshold: float):
    """
    Score an estimate against ground truth.

    Reads OUT/U.csv, writes OUT/metrics.json and prints it.
    """
    with _exit_codes("eval"):
        U = read_factors(out / "U.csv")
        Ustar = read_factors(truth)
        metrics = dict(metrics_record(U, Ustar, success_threshold))
        write_metrics(metrics, out / "metrics.json")
    click.echo(json.dumps(metrics, indent=2))


def _run_sweep(command: str, config_path: Path, out: Path, threads: int | None, methods: tuple) -> None:
    with _exit_codes(command):
        config = load_config(config_path)
        _check_kind(command, config)
        result = run_experiment(config, threads=threads, methods=methods)
        written = result.write(out)
    for path in written:
        click.echo(f"Wrote {path}")
    click.echo(result.aggregate[["grid_value", "method", "trials", "success_rate"]].to_string(index=False))


def _check_kind(command: str, config: ExperimentConfig) -> None:
    if command == "tpm-compare" and config.is_asym:
        raise ExperimentConfigError("tpm-compare failed: the comparison needs a symmetric experiment kind.")
    if command == "asym-experiment" and not config.is_asym:
        raise ExperimentConfigError(
            f"asym-experiment failed: expected kind 'asym-convergence', got {config.kind!r}."
        )


_config_option = click.option(
    "--config", "config_path", type=click.Path(path_type=Path), required=True, help="JSON experiment config."
)
_out_option = click.option("--out", type=click.Path(path_type=Path), required=True, help="Output directory.")
_threads_option = click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads.")


@cli.command()
@_config_option
@_out_option
@_threads_option
def experiment(config_path: Path, out: Path, threads: int | None):
    """
    Run a Monte Carlo sweep (convergence, phase, rank, snr or asym-convergence).

    Writes rows.csv, aggregate.csv and timings.csv to OUT, plus traces.csv
    for convergence sweeps. rows.csv does not depend on --threads.
    """
    _run_sweep("experiment", config_path, out, threads, ("spectral",))


@cli.command(name="tpm-compare")
@_config_option
@_out_option
@_threads_option
def tpm_compare(config_path: Path, out: Path, threads: int | None):
    """
    Run a symmetric sweep with both the spectral and tensor power method
    initializers on identical instances. Output rows carry a method column.
    """
    _run_sweep("tpm-compare", config_path, out, threads, ("spectral", "tpm"))


@cli.command(name="asym-gen")
@click.option("--d", "dims", required=True, callback=_parse_dims, help="Dimensions as d1,d2,d3.")
@click.option("--r", "r", type=int, required=True, help="CP rank of the ground truth.")
@click.option("--p", "p", type=float, required=True, help="Sampling rate in (0, 1].")
@click.option("--sigma", type=float, default=0.0, show_default=True, help="Noise standard deviation.")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output directory.")
def asym_gen(dims: tuple[int, int, int], r: int, p: float, sigma: float, seed: int, out: Path):
    """
    Generate a random asymmetric instance.

    Writes the observation directory to OUT and the ground truth to
    OUT/truth/{U,V,W}.csv.
    """
    with _exit_codes("asym-gen"):
        truth = gen_asym_factors(*dims, r, seed)
        obs = sample_asym_observations(truth, p, sigma, seed)
        write_asym_observations(obs, out)
        write_asym_factors(truth, out / "truth")
    click.echo(f"Generated dims={dims} r={r}: {obs.num_entries} observed entries -> {out}")


@cli.command(name="asym-complete")
@click.option("--obs", "obs_dir", type=click.Path(path_type=Path), required=True, help="Observation directory.")
@click.option("--r", "r", type=int, required=True, help="Target rank.")
@click.option("--L", "L", type=int, default=None, help="Retrieval trials. Defaults to r^2.")
@click.option("--eps-th", type=float, default=DEFAULT_EPS_TH, show_default=True, help="Pruning threshold.")
@click.option("--eta", type=float, default=DEFAULT_ASYM_ETA, show_default=True, help="Dimensionless stepsize.")
@click.option("--iters", type=int, default=DEFAULT_ITERS, show_default=True, help="Gradient descent iterations.")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output directory.")
@click.option("--truth", type=click.Path(path_type=Path), default=None, help="Directory with U.csv, V.csv, W.csv.")
@click.option("--success-threshold", type=float, default=DEFAULT_SUCCESS_THRESHOLD, show_default=True)
def asym_complete(
    obs_dir: Path,
    r: int,
    L: int | None,
    eps_th: float,
    eta: float,
    iters: int,
    seed: int,
    out: Path,
    truth: Path | None,
    success_threshold: float,
):
    """
    Complete an asymmetric tensor.

    Writes U.csv, V.csv, W.csv and trace.csv to OUT, plus metrics.json with
    per-matrix and tensor errors when --truth is given.
    """
    with _exit_codes("asym-complete"):
        obs = read_asym_observations(obs_dir)
        reference = read_asym_factors(truth) if truth is not None else None

        with RunSession() as session:
            run = complete_asym(
                obs, r, L=L, eps_th=eps_th, eta=eta, t0=iters, seed=seed, truth=reference
            )

        write_asym_factors(run.F, out)
        trace = run.trace.to_frame()
        write_frame(trace, out / "trace.csv")
        if reference is not None:
            write_metrics(asym_metrics_record(run.F, reference, success_threshold), out / "metrics.json")

    click.echo(summary(session).to_string(index=False))
    click.echo("")
    click.echo(trace_summary(trace).to_string(index=False))
    click.echo(f"\nFinal loss {run.trace.final_loss:.6e}; results in {out}")


@cli.command(name="asym-experiment")
@_config_option
@_out_option
@_threads_option
def asym_experiment(config_path: Path, out: Path, threads: int | None):
    """Run an asym-convergence sweep; same outputs as `experiment`."""
    _run_sweep("asym-experiment", config_path, out, threads, ("spectral",))


def main():
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
