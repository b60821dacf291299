"""Synthetic ground truth, Bernoulli sampling and incoherence diagnostics."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .._types import FactorMatrix, IndexArray
from . import _random
from ._sparse import cp_values
from ._validation import (
    validate_factor_matrix,
    validate_noise_level,
    validate_probability,
)
from .observations import ObservationSet
from .tensor import cp_compose

logger = logging.getLogger(__name__)


def gen_factors(d: int, r: int, seed: int) -> FactorMatrix:
    """
    Ground-truth factors with i.i.d. standard Gaussian entries.

    Example:
        Ustar = gen_factors(100, 4, seed=7)
    """
    if d < 1 or r < 1:
        raise ValueError(f"gen_factors failed: d and r must be positive, got d={d}, r={r}.")
    return _random.stream(seed, _random.FACTORS).standard_normal((d, r))


def canonical_triples(d: int) -> IndexArray:
    """All (i, j, k) with i <= j <= k < d in lexicographic order."""
    i, j, k = np.meshgrid(np.arange(d), np.arange(d), np.arange(d), indexing="ij")
    keep = (i <= j) & (j <= k)
    return np.stack([i[keep], j[keep], k[keep]], axis=1).astype(np.int64)


def num_canonical_triples(d: int) -> int:
    """C(d + 2, 3), the number of distinct symmetric orbits."""
    return d * (d + 1) * (d + 2) // 6


def sample_observations(
    Ustar: FactorMatrix,
    p: float,
    sigma: float,
    seed: int,
    r_hint: int | None = None,
) -> ObservationSet:
    """
    Observe each canonical triple of cp_compose(Ustar) independently with probability p.

    Observed values carry one N(0, sigma²) draw per canonical triple; the
    expansion to all index permutations replicates it, so the noise tensor is
    symmetric. Mask and noise come from separate streams of ``seed``.

    Args:
        Ustar: d x r ground-truth factors.
        p: Sampling rate in (0, 1].
        sigma: Noise standard deviation, >= 0.
        seed: Master seed.
        r_hint: Rank recorded in the manifest (defaults to Ustar's width).
    """
    Ustar = validate_factor_matrix(Ustar, "sample_observations", "Ustar")
    validate_probability(p, "sample_observations")
    validate_noise_level(sigma, "sample_observations")
    d, r = Ustar.shape

    triples = canonical_triples(d)
    keep = _random.stream(seed, _random.MASK).random(triples.shape[0]) < p
    chosen = triples[keep]
    values = cp_values(chosen, Ustar, Ustar, Ustar)
    if sigma > 0:
        values = values + sigma * _random.stream(seed, _random.NOISE).standard_normal(chosen.shape[0])

    logger.debug(
        "sampled %d of %d canonical triples (d=%d, p=%g, sigma=%g)",
        chosen.shape[0], triples.shape[0], d, p, sigma,
    )
    return ObservationSet(
        d=d,
        p=p,
        sigma=sigma,
        seed=seed,
        indices=chosen,
        values=values,
        r_hint=r if r_hint is None else r_hint,
    )


def snr_to_sigma(Ustar: FactorMatrix, snr: float) -> float:
    """Noise level giving SNR = (‖T*‖_F² / d³) / σ²; SNR = inf maps to 0."""
    if not snr > 0:
        raise ValueError(f"snr_to_sigma failed: SNR must be positive, got {snr}.")
    if np.isinf(snr):
        return 0.0
    T = cp_compose(Ustar)
    return float(np.sqrt(np.sum(T * T) / T.size / snr))


@dataclass(frozen=True)
class IncoherenceStats:
    """Incoherence and conditioning of a ground-truth factor matrix."""

    mu0: float
    mu1: float
    mu2: float
    kappa: float
    lambda_min: float
    lambda_max: float

    @property
    def mu(self) -> float:
        """The single incoherence level max(mu0, mu1, mu2)."""
        return max(self.mu0, self.mu1, self.mu2)


def incoherence_stats(Ustar: FactorMatrix) -> IncoherenceStats:
    """
    Incoherence parameters, condition number and factor magnitudes of Ustar.

    mu0 = d³‖T*‖∞² / ‖T*‖_F²; mu1 = max_i d‖u_i‖∞² / ‖u_i‖₂²;
    mu2 = max_{i≠j} d⟨u_i, u_j⟩² / (‖u_i‖₂²‖u_j‖₂²), 0 when r = 1;
    kappa = max_i ‖u_i‖₂ / min_i ‖u_i‖₂; lambda_i = ‖u_i‖₂³.

    Raises:
        ValueError: if a column is identically zero, or if the columns cancel
            so that cp_compose(Ustar) vanishes (e.g. [u, -u]).
    """
    Ustar = validate_factor_matrix(Ustar, "incoherence_stats", "Ustar")
    d, r = Ustar.shape
    # canonical column order keeps every sum independent of how columns were given
    Ustar = Ustar[:, np.lexsort(Ustar[::-1])]
    sq_norms = np.sum(Ustar * Ustar, axis=0)
    if np.any(sq_norms == 0):
        raise ValueError("incoherence_stats failed: factor matrix has a zero column.")
    norms = np.sqrt(sq_norms)

    T = cp_compose(Ustar)
    frob_sq = float(np.sum(T * T))
    if frob_sq == 0.0:
        raise ValueError("incoherence_stats failed: the tensor built from Ustar is identically zero.")
    mu0 = d**3 * float(np.max(np.abs(T))) ** 2 / frob_sq

    mu1 = float(np.max(d * np.max(Ustar * Ustar, axis=0) / sq_norms))

    if r > 1:
        gram = Ustar.T @ Ustar
        coherence = d * gram**2 / np.outer(sq_norms, sq_norms)
        np.fill_diagonal(coherence, -np.inf)
        mu2 = float(np.max(coherence))
    else:
        mu2 = 0.0

    lambdas = norms**3
    return IncoherenceStats(
        mu0=mu0,
        mu1=mu1,
        mu2=mu2,
        kappa=float(norms.max() / norms.min()),
        lambda_min=float(lambdas.min()),
        lambda_max=float(lambdas.max()),
    )


__all__ = [
    "gen_factors",
    "canonical_triples",
    "num_canonical_triples",
    "sample_observations",
    "snr_to_sigma",
    "IncoherenceStats",
    "incoherence_stats",
]
