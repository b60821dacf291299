"""
End-to-end completion runs: initialization followed by gradient descent.

Both pipelines take a dimensionless stepsize and rescale it by the size of the
initial factors before handing a raw stepsize to the descent routine.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from ._types import FactorMatrix, InitMethod, Vector
from .operations.asym import (
    DEFAULT_ASYM_ETA,
    AsymFactors,
    AsymGdTrace,
    default_alpha,
    gd_asym,
    normalized_asym_stepsize,
)
from .operations.asym_init import init_asym
from .operations.descent import GdTrace, gd_run, normalized_stepsize
from .operations.initialization import (
    DEFAULT_EPS_TH,
    DEFAULT_L,
    DEFAULT_T_INIT,
    best_of_restarts,
    tpm_baseline,
)
from .operations.observations import AsymObservationSet, ObservationSet

logger = logging.getLogger(__name__)

DEFAULT_ETA = 0.2
DEFAULT_ITERS = 100


@dataclass
class SymmetricRun:
    """Result of complete_symmetric."""

    U0: FactorMatrix
    trace: GdTrace
    method: InitMethod = "spectral"

    @property
    def U(self) -> FactorMatrix:
        assert self.trace.final is not None
        return self.trace.final


@dataclass
class AsymRun:
    """Result of complete_asym; ``magnitudes`` are the initializer's λ estimates."""

    F0: AsymFactors
    magnitudes: Vector
    trace: AsymGdTrace

    @property
    def F(self) -> AsymFactors:
        assert self.trace.final is not None
        return self.trace.final


def complete_symmetric(
    obs: ObservationSet,
    r: int,
    *,
    L: int = DEFAULT_L,
    eps_th: float = DEFAULT_EPS_TH,
    t_init: int = DEFAULT_T_INIT,
    eta: float = DEFAULT_ETA,
    t0: int = DEFAULT_ITERS,
    seed: int = 0,
    method: InitMethod = "spectral",
    truth: FactorMatrix | None = None,
) -> SymmetricRun:
    """
    Complete a symmetric tensor from its observed entries.

    Args:
        obs: Observed entries.
        r: Target CP rank.
        L: Retrieval trials per restart.
        eps_th: Pruning threshold.
        t_init: Initialization restarts (best loss wins).
        eta: Dimensionless stepsize, scaled by 2 / mean_i ‖u_i⁰‖⁴ before descent.
        t0: Gradient descent iterations.
        seed: Seed for every random choice in the run.
        method: "spectral" for the subspace + retrieval initializer, "tpm" for
            the tensor power method baseline.
        truth: Optional ground truth; adds error columns to the trace.

    Raises:
        InitializationError: if every initialization restart fails.
        DivergenceError: if gradient descent produces a non-finite iterate.

    Example:
        >>> run = complete_symmetric(obs, r=4, seed=7)
        >>> run.trace.final_loss
    """
    if method == "spectral":
        U0 = best_of_restarts(obs, r, L, eps_th, t_init, seed)
    elif method == "tpm":
        U0 = tpm_baseline(obs, r, seed=seed)
    else:
        raise ValueError(f"complete_symmetric failed: unknown init method {method!r}.")

    step = normalized_stepsize(U0, eta)
    logger.debug("complete_symmetric: eta=%g normalized to %.3e", eta, step)
    trace = gd_run(obs, U0, step, t0, truth=truth)
    return SymmetricRun(U0=U0, trace=trace, method=method)


def complete_asym(
    obs: AsymObservationSet,
    r: int,
    *,
    L: int | None = None,
    eps_th: float = DEFAULT_EPS_TH,
    eta: float = DEFAULT_ASYM_ETA,
    t0: int = DEFAULT_ITERS,
    seed: int = 0,
    truth: AsymFactors | None = None,
) -> AsymRun:
    """
    Complete an asymmetric tensor: spectral initialization then regularized descent.

    ``L`` defaults to r². The penalty weights are α_i = λ̂_i^{2/3} from the
    initial factors, and the raw stepsize is eta / max_i λ̂_i^{4/3}.
    """
    trials = r * r if L is None else L
    F0, magnitudes = init_asym(obs, r, trials, eps_th, seed)
    step = normalized_asym_stepsize(F0, eta)
    trace = gd_asym(obs, F0, alpha=default_alpha(F0), eta=step, t0=t0, truth=truth)
    return AsymRun(F0=F0, magnitudes=magnitudes, trace=trace)


__all__ = [
    "DEFAULT_ETA",
    "DEFAULT_ITERS",
    "SymmetricRun",
    "AsymRun",
    "complete_symmetric",
    "complete_asym",
]
