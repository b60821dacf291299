"""
Monte Carlo trial execution.

Each trial is fully determined by the config and its seed
``base_seed + 10007·grid_index + trial``, so the worker pool only affects
wall time. Results are collected in (grid, method, trial) order.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .._types import FactorMatrix, InitMethod
from ..config import get_config
from ..loader import write_frame
from ..operations._validation import ConvergenceError, DivergenceError, InitializationError
from ..operations.asym import (
    DEFAULT_ASYM_ETA,
    asym_metrics_record,
    asym_snr_to_sigma,
    gen_asym_factors,
    sample_asym_observations,
)
from ..operations.initialization import DEFAULT_L
from ..operations.metrics import factor_errors, tensor_errors, two_inf
from ..operations.sampling import gen_factors, sample_observations, snr_to_sigma
from ..pipeline import DEFAULT_ETA, complete_asym, complete_symmetric
from .aggregate import aggregate_rows
from .config import CONVERGENCE_KINDS, ExperimentConfig

logger = logging.getLogger(__name__)

SEED_STRIDE = 10007

ROW_KEYS = ["grid_index", "grid_value", "trial", "seed", "method", "success", "error"]
SYM_METRIC_COLUMNS = [
    "rel_dist_f",
    "rel_dist_2inf",
    "rel_dist_inf",
    "rel_tensor_f",
    "rel_tensor_inf",
    "final_loss",
]
ASYM_METRIC_COLUMNS = [
    "rel_u_f",
    "rel_v_f",
    "rel_w_f",
    "rel_tensor_f",
    "rel_tensor_2inf",
    "rel_tensor_inf",
    "final_loss",
]
TIMING_COLUMNS = ["grid_index", "trial", "method", "seed", "wall_ms"]


def trial_seed(base_seed: int, grid_index: int, trial: int) -> int:
    """Seed of one trial, recoverable from the row it produces."""
    return base_seed + SEED_STRIDE * grid_index + trial


def rank_sampling_rate(d: int, r: int) -> float:
    """p = r·d^{-3/2}·ln²d, capped at 1."""
    return min(1.0, r * d ** -1.5 * math.log(d) ** 2)


def metric_columns(config: ExperimentConfig) -> list[str]:
    return ASYM_METRIC_COLUMNS if config.is_asym else SYM_METRIC_COLUMNS


@dataclass(frozen=True)
class TrialSpec:
    grid_index: int
    grid_value: float
    trial: int
    seed: int
    method: InitMethod = "spectral"


@dataclass
class TrialOutcome:
    row: dict[str, Any]
    wall_ms: float
    trace: pd.DataFrame | None = None


@dataclass
class ExperimentResult:
    """Tables produced by one sweep."""

    rows: pd.DataFrame
    aggregate: pd.DataFrame
    timings: pd.DataFrame
    traces: pd.DataFrame | None = None

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write rows.csv, aggregate.csv, timings.csv and, if present, traces.csv."""
        out = Path(out_dir)
        written = [
            write_frame(self.rows, out / "rows.csv"),
            write_frame(self.aggregate, out / "aggregate.csv"),
            write_frame(self.timings, out / "timings.csv"),
        ]
        if self.traces is not None:
            written.append(write_frame(self.traces, out / "traces.csv"))
        return written


def trial_specs(config: ExperimentConfig, methods: tuple[InitMethod, ...] = ("spectral",)) -> list[TrialSpec]:
    """Every (grid point, method, trial) of the sweep; methods share seeds."""
    return [
        TrialSpec(
            grid_index=g,
            grid_value=value,
            trial=t,
            seed=trial_seed(config.base_seed, g, t),
            method=method,
        )
        for g, value in enumerate(config.grid())
        for method in methods
        for t in range(config.trials)
    ]


def _failed_metrics(config: ExperimentConfig) -> dict[str, float]:
    return dict.fromkeys(metric_columns(config), math.nan)


def _symmetric_metrics(U: FactorMatrix, Ustar: FactorMatrix, final_loss: float, threshold: float) -> dict[str, Any]:
    errs = factor_errors(U, Ustar)
    rel_f, rel_inf = tensor_errors(U, Ustar)
    rel_dist_f = errs.dist_f / float(np.linalg.norm(Ustar))
    return {
        "success": bool(rel_dist_f <= threshold),
        "rel_dist_f": rel_dist_f,
        "rel_dist_2inf": errs.dist_2inf / two_inf(Ustar),
        "rel_dist_inf": errs.dist_inf / float(np.max(np.abs(Ustar))),
        "rel_tensor_f": rel_f,
        "rel_tensor_inf": rel_inf,
        "final_loss": final_loss,
    }


def _run_symmetric(config: ExperimentConfig, spec: TrialSpec, keep_trace: bool) -> tuple[dict[str, Any], pd.DataFrame | None]:
    r, p, L, sigma = config.r, config.p, config.L or DEFAULT_L, config.sigma
    if config.kind == "phase":
        p = spec.grid_value
    elif config.kind == "rank":
        r = int(spec.grid_value)
        p = rank_sampling_rate(config.d, r)
        L = config.L or r * r

    Ustar = gen_factors(config.d, r, spec.seed)
    if config.kind in ("snr", "convergence"):
        sigma = snr_to_sigma(Ustar, spec.grid_value)
    obs = sample_observations(Ustar, p, sigma, spec.seed)

    run = complete_symmetric(
        obs,
        r,
        L=L,
        eps_th=config.eps_th,
        t_init=config.t_init,
        eta=DEFAULT_ETA if config.eta is None else config.eta,
        t0=config.t0,
        seed=spec.seed,
        method=spec.method,
        truth=Ustar if keep_trace else None,
    )
    metrics = _symmetric_metrics(run.U, Ustar, run.trace.final_loss, config.success_threshold)
    return metrics, run.trace.to_frame() if keep_trace else None


def _run_asym(config: ExperimentConfig, spec: TrialSpec, keep_trace: bool) -> tuple[dict[str, Any], pd.DataFrame | None]:
    d1, d2, d3 = config.tensor_dims
    truth = gen_asym_factors(d1, d2, d3, config.r, spec.seed)
    sigma = asym_snr_to_sigma(truth, spec.grid_value)
    obs = sample_asym_observations(truth, config.p, sigma, spec.seed)

    run = complete_asym(
        obs,
        config.r,
        L=config.L,
        eps_th=config.eps_th,
        eta=DEFAULT_ASYM_ETA if config.eta is None else config.eta,
        t0=config.t0,
        seed=spec.seed,
        truth=truth if keep_trace else None,
    )
    record = asym_metrics_record(run.F, truth, config.success_threshold)
    metrics = {"success": record["success"], "final_loss": run.trace.final_loss}
    metrics.update({col: record[col] for col in ASYM_METRIC_COLUMNS if col != "final_loss"})
    return metrics, run.trace.to_frame() if keep_trace else None


def run_trial(config: ExperimentConfig, spec: TrialSpec) -> TrialOutcome:
    """
    Run one trial. Initialization and divergence failures become an
    unsuccessful row with the cause in ``error``; they never propagate.
    """
    keep_trace = config.kind in CONVERGENCE_KINDS
    row: dict[str, Any] = {
        "grid_index": spec.grid_index,
        "grid_value": spec.grid_value,
        "trial": spec.trial,
        "seed": spec.seed,
        "method": spec.method,
        "success": False,
        "error": "",
    }
    trace = None
    start = time.perf_counter()
    try:
        if config.is_asym:
            metrics, trace = _run_asym(config, spec, keep_trace)
        else:
            metrics, trace = _run_symmetric(config, spec, keep_trace)
    except InitializationError as e:
        logger.info("trial %d/%d (seed %d) failed to initialize: %s", spec.grid_index, spec.trial, spec.seed, e)
        row["error"] = "init_failure"
        metrics = _failed_metrics(config)
    except ConvergenceError as e:
        logger.info("trial %d/%d (seed %d) solver did not converge: %s", spec.grid_index, spec.trial, spec.seed, e)
        row["error"] = "solver_failure"
        metrics = _failed_metrics(config)
    except DivergenceError as e:
        logger.info("trial %d/%d (seed %d) diverged: %s", spec.grid_index, spec.trial, spec.seed, e)
        row["error"] = "divergence"
        metrics = _failed_metrics(config)
    wall_ms = (time.perf_counter() - start) * 1000
    row.update(metrics)

    if trace is not None:
        trace.insert(0, "method", spec.method)
        trace.insert(0, "trial", spec.trial)
        trace.insert(0, "grid_index", spec.grid_index)
    return TrialOutcome(row=row, wall_ms=wall_ms, trace=trace)


def run_experiment(
    config: ExperimentConfig,
    threads: int | None = None,
    methods: tuple[InitMethod, ...] = ("spectral",),
) -> ExperimentResult:
    """
    Run every trial of a sweep on a bounded thread pool.

    Args:
        config: Validated experiment configuration.
        threads: Worker count; defaults to the configured thread count.
        methods: Initializers to compare on identical instances.

    Returns:
        Rows, aggregate, timings and (for convergence kinds) traces. Rows are
        identical for any thread count.
    """
    if config.is_asym and methods != ("spectral",):
        raise ValueError("run_experiment failed: asym-convergence supports only the spectral initializer.")
    workers = threads if threads is not None else get_config().threads
    if workers < 1:
        raise ValueError(f"run_experiment failed: threads must be >= 1, got {workers}.")

    specs = trial_specs(config, methods)
    logger.info("running %d trials of %s on %d thread(s)", len(specs), config.kind, workers)
    task = partial(run_trial, config)
    if workers == 1:
        outcomes = [task(spec) for spec in specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(task, specs))

    rows = pd.DataFrame(
        [outcome.row for outcome in outcomes],
        columns=ROW_KEYS + metric_columns(config),
    ).astype({"grid_index": "int64", "trial": "int64", "seed": "int64", "success": "bool"})
    timings = pd.DataFrame(
        [
            {"grid_index": s.grid_index, "trial": s.trial, "method": s.method, "seed": s.seed, "wall_ms": o.wall_ms}
            for s, o in zip(specs, outcomes)
        ],
        columns=TIMING_COLUMNS,
    )
    traces = None
    if config.kind in CONVERGENCE_KINDS:
        frames = [o.trace for o in outcomes if o.trace is not None]
        traces = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()

    aggregate = aggregate_rows(rows, metric_columns(config))
    return ExperimentResult(rows=rows, aggregate=aggregate, timings=timings, traces=traces)


__all__ = [
    "SEED_STRIDE",
    "ROW_KEYS",
    "SYM_METRIC_COLUMNS",
    "ASYM_METRIC_COLUMNS",
    "TrialSpec",
    "TrialOutcome",
    "ExperimentResult",
    "trial_seed",
    "rank_sampling_rate",
    "metric_columns",
    "trial_specs",
    "run_trial",
    "run_experiment",
]
