"""
Spectral initialization for symmetric tensor completion.

Stages, in order: a rank-r subspace estimate from the off-diagonal Gram matrix
of the rescaled mode-1 unfolding; L randomized retrievals, each projecting a
Gaussian vector onto the subspace, contracting the tensor with it and taking the
leading singular vector of the resulting matrix; and a greedy prune that keeps
the r most reliable, mutually distinct directions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .._types import FactorMatrix, Matrix, Vector
from . import _random
from ._base import tracked
from ._sparse import contract_to_axis, contract_to_matrix, mode1_unfolding, offdiag_gram, rank_one_inner
from ._validation import (
    ConvergenceError,
    DimensionMismatchError,
    InitializationError,
    as_float_array,
    validate_rank,
)
from .descent import loss
from .observations import ObservationSet
from .spectral import top_r_eigs, top_two_singular
from .tensor import unfold1

logger = logging.getLogger(__name__)

DEFAULT_L = 16
DEFAULT_EPS_TH = 0.4
DEFAULT_T_INIT = 5
DEFAULT_TPM_ITERS = 16
DEFAULT_TPM_RESTARTS = 16

_DENSE_GRAM_LIMIT = 32


@dataclass(frozen=True)
class Candidate:
    """One retrieval attempt: unit direction, magnitude estimate and spectral gap."""

    nu: Vector
    lam: float
    spec_gap: float


def build_gram(obs: ObservationSet, dense: bool = False) -> Matrix:
    """
    B = P_offdiag(A Aᵀ) with A the mode-1 unfolding of p⁻¹T.

    The product is formed from the sparse unfolding; ``dense=True`` builds the
    full d x d² unfolding instead and is only allowed for d <= 32.
    """
    if obs.num_canonical == 0:
        raise ValueError("build_gram failed: observation set is empty.")
    if dense:
        if obs.d > _DENSE_GRAM_LIMIT:
            raise ValueError(
                f"build_gram failed: dense path is limited to d <= {_DENSE_GRAM_LIMIT}, got d={obs.d}."
            )
        A = unfold1(obs.to_dense() / obs.p)
        B = A @ A.T
        B = (B + B.T) / 2
        np.fill_diagonal(B, 0.0)
        return B
    A = mode1_unfolding(obs.expanded_indices, obs.expanded_values / obs.p, obs.dims)
    return offdiag_gram(A)


@tracked("subspace_estimate", detail=lambda basis: {"r": basis.shape[1]})
def subspace_estimate(obs: ObservationSet, r: int, seed: int = 0) -> Matrix:
    """Orthonormal d x r basis of the top-r eigenspace of build_gram(obs)."""
    validate_rank(r, obs.d, "subspace_estimate")
    B = build_gram(obs)
    result = top_r_eigs(B, r, seed=_random.solver_seed(seed, 0))
    logger.debug("subspace_estimate: top eigenvalues %s", np.array2string(result.values, precision=4))
    return result.basis


def retrieve_one_factor(
    obs: ObservationSet,
    U: Matrix,
    g: Vector,
    seed: int = 0,
) -> Candidate:
    """
    One randomized retrieval.

    θ = UUᵀg, M = p⁻¹T ×3 θ, and the candidate direction is the leading singular
    vector of M, signed so that ⟨T, ν⊗3⟩ >= 0. The magnitude estimate is
    ⟨p⁻¹T, ν⊗3⟩ and the gap is σ1(M) − σ2(M); both contractions run over the
    observed cells only.

    Args:
        obs: Observed entries.
        U: d x r orthonormal subspace estimate.
        g: Length-d random vector.
        seed: Seed of the singular-vector solver start.
    """
    U = as_float_array(U, 2, "U", "retrieve_one_factor")
    g = as_float_array(g, 1, "g", "retrieve_one_factor")
    if U.shape[0] != obs.d or g.shape != (obs.d,):
        raise DimensionMismatchError(
            f"retrieve_one_factor failed: U {U.shape} and g {g.shape} must have d={obs.d} rows."
        )
    idx = obs.expanded_indices
    vals = obs.expanded_values
    theta = U @ (U.T @ g)
    M = contract_to_matrix(idx, vals * theta[idx[:, 2]] / obs.p, (0, 1), (obs.d, obs.d))
    pair = top_two_singular(M, seed=seed)

    nu = pair.right1
    score = rank_one_inner(idx, vals, nu, nu, nu)
    if score < 0:
        nu = -nu
        score = -score
    return Candidate(nu=nu, lam=score / obs.p, spec_gap=pair.gap)


def prune(candidates: list[Candidate], r: int, eps_th: float) -> list[Candidate]:
    """
    Greedy selection of r distinct directions, largest spectral gap first.

    Each round picks the remaining candidate with the largest gap (lowest index
    on ties) and discards it together with every candidate whose direction has
    |⟨ν, w⟩| > 1 − eps_th.

    Raises:
        InitializationError: if the pool runs dry before r picks; ``found``
            holds the number already selected.

    Example:
        picked = prune(candidates, r=4, eps_th=0.4)
    """
    if not candidates:
        raise ValueError("prune failed: no candidates supplied.")
    picks = prune_indices([c.nu for c in candidates], [c.spec_gap for c in candidates], r, eps_th)
    return [candidates[tau] for tau in picks]


def prune_indices(
    directions: list[Vector],
    gaps: list[float],
    r: int,
    eps_th: float,
) -> list[int]:
    """Index form of prune, shared with the asymmetric initializer."""
    if not 0.0 < eps_th < 1.0:
        raise ValueError(f"prune failed: eps_th must lie in (0, 1), got {eps_th}.")
    if r < 1:
        raise ValueError(f"prune failed: r must be at least 1, got {r}.")
    remaining = list(range(len(directions)))
    selected: list[int] = []
    for found in range(r):
        if not remaining:
            logger.debug(
                "prune: pool of %d candidates exhausted after %d of %d factors (eps_th=%g)",
                len(directions),
                found,
                r,
                eps_th,
            )
            raise InitializationError(
                f"prune failed: candidate pool exhausted after {found} of {r} factors.",
                found=found,
            )
        best = remaining[0]
        for tau in remaining[1:]:
            if gaps[tau] > gaps[best]:
                best = tau
        w = directions[best]
        selected.append(best)
        remaining = [
            tau
            for tau in remaining
            if tau != best and abs(float(np.dot(directions[tau], w))) <= 1.0 - eps_th
        ]
    return selected


def _columns_from(picked: list[Candidate]) -> FactorMatrix:
    return np.column_stack([np.cbrt(c.lam) * c.nu for c in picked])


@tracked("init", detail=lambda U0: {"r": U0.shape[1]})
def init(
    obs: ObservationSet,
    r: int,
    L: int = DEFAULT_L,
    eps_th: float = DEFAULT_EPS_TH,
    seed: int = 0,
    restart: int = 0,
    basis: Matrix | None = None,
) -> FactorMatrix:
    """
    Spectral initialization U⁰ = [λ₁^{1/3} w¹, …, λ_r^{1/3} w^r].

    Draws L Gaussian vectors from the retrieval stream of (seed, restart), runs
    one retrieval per draw and prunes. Negative magnitudes keep their sign
    through the odd cube root.

    Args:
        obs: Observed entries.
        r: Target rank.
        L: Number of retrieval trials, >= r.
        eps_th: Prune threshold in (0, 1).
        seed: Master seed.
        restart: Restart index selecting an independent retrieval stream.
        basis: Precomputed subspace estimate (computed when omitted).

    Raises:
        InitializationError: if pruning cannot find r factors.
    """
    validate_rank(r, obs.d, "init")
    if L < r:
        raise ValueError(f"init failed: L={L} must be at least r={r}.")
    if basis is None:
        basis = subspace_estimate(obs, r, seed)

    draws = _random.stream(seed, _random.RETRIEVAL, restart).standard_normal((L, obs.d))
    candidates = [
        retrieve_one_factor(obs, basis, draws[tau], seed=_random.solver_seed(seed, 1, restart, tau))
        for tau in range(L)
    ]
    return _columns_from(prune(candidates, r, eps_th))


@tracked("best_of_restarts", detail=lambda U0: {"r": U0.shape[1]})
def best_of_restarts(
    obs: ObservationSet,
    r: int,
    L: int = DEFAULT_L,
    eps_th: float = DEFAULT_EPS_TH,
    t_init: int = DEFAULT_T_INIT,
    seed: int = 0,
) -> FactorMatrix:
    """
    Run init t_init times on independent retrieval streams and keep the lowest-loss result.

    Restarts share one subspace estimate. A restart that fails is logged and
    skipped; the call fails only when every restart does.
    """
    if t_init < 1:
        raise ValueError(f"best_of_restarts failed: t_init must be at least 1, got {t_init}.")
    validate_rank(r, obs.d, "best_of_restarts")
    basis = subspace_estimate(obs, r, seed)

    best: FactorMatrix | None = None
    best_loss = np.inf
    most_found = 0
    for k in range(t_init):
        try:
            U0 = init(obs, r, L, eps_th, seed, restart=k, basis=basis)
        except InitializationError as e:
            most_found = max(most_found, e.found)
            logger.debug("restart %d: prune kept %d of %d factors from a pool of %d trials", k + 1, e.found, r, L)
            logger.warning("restart %d of %d failed: %s", k + 1, t_init, e)
            continue
        except ConvergenceError as e:
            logger.warning("restart %d of %d failed: %s", k + 1, t_init, e)
            continue
        value = loss(obs, U0)
        logger.debug("restart %d: loss %.6e", k + 1, value)
        if best is None or value < best_loss:
            best, best_loss = U0, value

    if best is None:
        raise InitializationError(
            f"best_of_restarts failed: all {t_init} restarts failed.", found=most_found
        )
    return best


def _tpm_contract(obs: ObservationSet, u: Vector, found: list[Candidate]) -> Vector:
    idx = obs.expanded_indices
    v = contract_to_axis(idx, obs.expanded_values * u[idx[:, 0]] * u[idx[:, 1]], 2, obs.d) / obs.p
    for c in found:
        v -= c.lam * float(np.dot(c.nu, u)) ** 2 * c.nu
    return v


def _tpm_score(obs: ObservationSet, u: Vector, found: list[Candidate]) -> float:
    score = rank_one_inner(obs.expanded_indices, obs.expanded_values, u, u, u) / obs.p
    for c in found:
        score -= c.lam * float(np.dot(c.nu, u)) ** 3
    return score


@tracked("tpm_baseline", detail=lambda U0: {"r": U0.shape[1]})
def tpm_baseline(
    obs: ObservationSet,
    r: int,
    iters: int = DEFAULT_TPM_ITERS,
    restarts: int = DEFAULT_TPM_RESTARTS,
    seed: int = 0,
) -> FactorMatrix:
    """
    Robust tensor power method with deflation, used as a comparison initializer.

    For each factor slot: ``restarts`` random unit starts, each iterated
    u ← normalize(p⁻¹T_defl ×1 u ×2 u) for ``iters`` steps and scored by
    ⟨p⁻¹T_defl, u⊗3⟩; the best is kept and deflated away before the next slot.
    Deflation is applied implicitly inside the contractions.
    """
    validate_rank(r, obs.d, "tpm_baseline")
    if iters < 1 or restarts < 1:
        raise ValueError(
            f"tpm_baseline failed: iters and restarts must be positive, got {iters}, {restarts}."
        )
    rng = _random.stream(seed, _random.TPM)

    def fresh() -> Vector:
        u = rng.standard_normal(obs.d)
        return u / np.linalg.norm(u)

    found: list[Candidate] = []
    for _slot in range(r):
        best_u: Vector | None = None
        best_score = -np.inf
        for _ in range(restarts):
            u = fresh()
            for _ in range(iters):
                v = _tpm_contract(obs, u, found)
                norm = float(np.linalg.norm(v))
                u = v / norm if norm > 0 else fresh()
            score = _tpm_score(obs, u, found)
            if best_u is None or score > best_score:
                best_u, best_score = u, score
        assert best_u is not None
        found.append(Candidate(nu=best_u, lam=best_score, spec_gap=0.0))
    return _columns_from(found)


__all__ = [
    "DEFAULT_L",
    "DEFAULT_EPS_TH",
    "DEFAULT_T_INIT",
    "DEFAULT_TPM_ITERS",
    "DEFAULT_TPM_RESTARTS",
    "Candidate",
    "build_gram",
    "subspace_estimate",
    "retrieve_one_factor",
    "prune",
    "prune_indices",
    "init",
    "best_of_restarts",
    "tpm_baseline",
]
