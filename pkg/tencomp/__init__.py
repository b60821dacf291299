"""
tencomp - Low-rank tensor completion by spectral initialization and gradient descent.

Example:
    Ustar = gen_factors(d=100, r=4, seed=7)
    obs = sample_observations(Ustar, p=0.1, sigma=0.0, seed=7)
    with RunSession() as session:
        run = complete_symmetric(obs, r=4, seed=7)
        print(session.summary())
    print(metrics_record(run.U, Ustar))
"""

__version__ = "0.1.0"

from .config import configure, get_config, reset_config

# Display
from .display import summary, trace_summary

# Experiments
from .experiments import (
    ExperimentConfig,
    aggregate_rows,
    load_config,
    run_experiment,
    snr_slope,
)

# File I/O
from .loader import (
    read_asym_factors,
    read_asym_observations,
    read_factors,
    read_metrics,
    read_observations,
    write_asym_factors,
    write_asym_observations,
    write_factors,
    write_frame,
    write_metrics,
    write_observations,
)

# Errors
from .operations._validation import (
    ConvergenceError,
    DimensionMismatchError,
    DivergenceError,
    ExperimentConfigError,
    InitializationError,
    ObservationParseError,
)

# Asymmetric model
from .operations.asym import (
    AsymFactors,
    RegParams,
    asym_factor_errors,
    asym_metrics_record,
    asym_tensor_errors,
    gd_asym,
    gen_asym_factors,
    grad_asym,
    loss_asym,
    sample_asym_observations,
)
from .operations.asym_init import init_asym

# Gradient descent
from .operations.descent import GdTrace, gd_run, gradient, loss, normalized_stepsize, theorem_stepsize

# Initialization
from .operations.initialization import (
    best_of_restarts,
    build_gram,
    init,
    prune,
    retrieve_one_factor,
    subspace_estimate,
    tpm_baseline,
)

# Metrics
from .operations.metrics import factor_errors, match_permutation, metrics_record, success, tensor_errors

# Instances
from .operations.observations import AsymObservationSet, ObservationSet
from .operations.sampling import (
    canonical_triples,
    gen_factors,
    incoherence_stats,
    sample_observations,
    snr_to_sigma,
)

# Spectral solvers
from .operations.spectral import top_r_eigs, top_two_singular

# Tensor algebra
from .operations.tensor import (
    cp_compose,
    cp_compose_asym,
    fold1,
    mode_product,
    mode_product2,
    seq_product,
    unfold1,
)
from .pipeline import AsymRun, SymmetricRun, complete_asym, complete_symmetric
from .session import RunSession

__all__ = [
    "__version__",
    "configure",
    "get_config",
    "reset_config",
    "RunSession",
    # Errors
    "DimensionMismatchError",
    "ConvergenceError",
    "InitializationError",
    "DivergenceError",
    "ObservationParseError",
    "ExperimentConfigError",
    # Tensor algebra
    "cp_compose",
    "cp_compose_asym",
    "mode_product",
    "mode_product2",
    "seq_product",
    "unfold1",
    "fold1",
    # Spectral solvers
    "top_r_eigs",
    "top_two_singular",
    # Instances
    "ObservationSet",
    "AsymObservationSet",
    "gen_factors",
    "canonical_triples",
    "sample_observations",
    "snr_to_sigma",
    "incoherence_stats",
    # File I/O
    "write_observations",
    "read_observations",
    "write_factors",
    "read_factors",
    "write_asym_observations",
    "read_asym_observations",
    "write_asym_factors",
    "read_asym_factors",
    "write_frame",
    "write_metrics",
    "read_metrics",
    # Initialization
    "build_gram",
    "subspace_estimate",
    "retrieve_one_factor",
    "prune",
    "init",
    "best_of_restarts",
    "tpm_baseline",
    # Gradient descent
    "GdTrace",
    "loss",
    "gradient",
    "gd_run",
    "normalized_stepsize",
    "theorem_stepsize",
    # Metrics
    "match_permutation",
    "factor_errors",
    "tensor_errors",
    "success",
    "metrics_record",
    # Asymmetric model
    "AsymFactors",
    "RegParams",
    "gen_asym_factors",
    "sample_asym_observations",
    "loss_asym",
    "grad_asym",
    "gd_asym",
    "init_asym",
    "asym_factor_errors",
    "asym_tensor_errors",
    "asym_metrics_record",
    # Pipelines
    "SymmetricRun",
    "AsymRun",
    "complete_symmetric",
    "complete_asym",
    # Experiments
    "ExperimentConfig",
    "load_config",
    "run_experiment",
    "aggregate_rows",
    "snr_slope",
    # Display
    "summary",
    "trace_summary",
]
