"""
Monte Carlo experiments over seeded synthetic instances.

Functions:
    load_config: Read and validate a JSON experiment config.
    run_experiment: Run every trial of a sweep and collect its tables.
    aggregate_rows: Per-grid-point success rates and error summaries.
    snr_slope: Log-log slope of an error summary against SNR.
"""
from .aggregate import aggregate_rows, snr_slope
from .config import ExperimentConfig, config_from_dict, load_config
from .runner import (
    ExperimentResult,
    TrialSpec,
    rank_sampling_rate,
    run_experiment,
    run_trial,
    trial_seed,
    trial_specs,
)

__all__ = [
    "ExperimentConfig",
    "config_from_dict",
    "load_config",
    "ExperimentResult",
    "TrialSpec",
    "trial_seed",
    "trial_specs",
    "rank_sampling_rate",
    "run_trial",
    "run_experiment",
    "aggregate_rows",
    "snr_slope",
]
