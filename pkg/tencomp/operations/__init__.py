from ._random import solver_seed, stream
from ._tracking import (
    SessionTracker,
    StageRecord,
    get_active_session,
    is_tracking,
    set_active_session,
)
from ._validation import (
    ConvergenceError,
    DimensionMismatchError,
    DivergenceError,
    ExperimentConfigError,
    InitializationError,
    ObservationParseError,
)
from .asym import (
    AsymFactorErrors,
    AsymFactors,
    AsymGdTrace,
    MatrixMatch,
    RegParams,
    asym_factor_errors,
    asym_metrics_record,
    asym_snr_to_sigma,
    asym_tensor_errors,
    default_alpha,
    default_asym_stepsize,
    gd_asym,
    gen_asym_factors,
    grad_asym,
    loss_asym,
    normalized_asym_stepsize,
    reg,
    reg_gradient,
    sample_asym_observations,
)
from .asym_init import init_asym
from .descent import (
    GdTrace,
    TraceRecord,
    gd_run,
    gradient,
    loss,
    normalized_stepsize,
    theorem_stepsize,
)
from .initialization import (
    Candidate,
    best_of_restarts,
    build_gram,
    init,
    prune,
    retrieve_one_factor,
    subspace_estimate,
    tpm_baseline,
)
from .metrics import (
    FactorErrors,
    factor_errors,
    match_permutation,
    metrics_record,
    success,
    tensor_errors,
)
from .observations import AsymObservationSet, ObservationSet
from .sampling import (
    IncoherenceStats,
    canonical_triples,
    gen_factors,
    incoherence_stats,
    num_canonical_triples,
    sample_observations,
    snr_to_sigma,
)
from .spectral import EigResult, SingularPair, top_r_eigs, top_two_singular
from .tensor import (
    cp_compose,
    cp_compose_asym,
    fold1,
    frob_norm,
    inf_norm,
    inner,
    is_symmetric,
    mode_product,
    mode_product2,
    outer3,
    seq_product,
    two_inf_norm,
    unfold1,
)

__all__ = [
    # Randomness
    "stream",
    "solver_seed",
    # Tracking
    "StageRecord",
    "SessionTracker",
    "get_active_session",
    "set_active_session",
    "is_tracking",
    # Errors
    "DimensionMismatchError",
    "ConvergenceError",
    "InitializationError",
    "DivergenceError",
    "ObservationParseError",
    "ExperimentConfigError",
    # Tensor core
    "outer3",
    "cp_compose",
    "cp_compose_asym",
    "mode_product",
    "mode_product2",
    "seq_product",
    "unfold1",
    "fold1",
    "inner",
    "frob_norm",
    "inf_norm",
    "two_inf_norm",
    "is_symmetric",
    # Spectral
    "EigResult",
    "SingularPair",
    "top_r_eigs",
    "top_two_singular",
    # Instances
    "ObservationSet",
    "AsymObservationSet",
    "IncoherenceStats",
    "gen_factors",
    "canonical_triples",
    "num_canonical_triples",
    "sample_observations",
    "snr_to_sigma",
    "incoherence_stats",
    # Initialization
    "Candidate",
    "build_gram",
    "subspace_estimate",
    "retrieve_one_factor",
    "prune",
    "init",
    "best_of_restarts",
    "tpm_baseline",
    # Gradient descent
    "TraceRecord",
    "GdTrace",
    "loss",
    "gradient",
    "gd_run",
    "normalized_stepsize",
    "theorem_stepsize",
    # Metrics
    "FactorErrors",
    "match_permutation",
    "factor_errors",
    "tensor_errors",
    "success",
    "metrics_record",
    # Asymmetric
    "AsymFactors",
    "RegParams",
    "MatrixMatch",
    "AsymFactorErrors",
    "AsymGdTrace",
    "gen_asym_factors",
    "sample_asym_observations",
    "asym_snr_to_sigma",
    "reg",
    "reg_gradient",
    "loss_asym",
    "grad_asym",
    "gd_asym",
    "default_alpha",
    "default_asym_stepsize",
    "normalized_asym_stepsize",
    "asym_factor_errors",
    "asym_tensor_errors",
    "asym_metrics_record",
    "init_asym",
]
