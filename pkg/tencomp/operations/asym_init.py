"""Spectral initialization for the asymmetric model."""
from __future__ import annotations

import logging

import numpy as np

from .._types import Vector
from . import _random
from ._base import tracked
from ._sparse import contract_to_axis, contract_to_matrix, mode1_unfolding, offdiag_gram
from ._validation import validate_rank
from .asym import AsymFactors
from .initialization import DEFAULT_EPS_TH, DEFAULT_L, prune_indices
from .observations import AsymObservationSet
from .spectral import top_r_eigs, top_two_singular

logger = logging.getLogger(__name__)


def _positive_peak(x: Vector) -> Vector:
    """Flip x so that its largest-magnitude entry (first on ties) is positive."""
    return -x if x[int(np.argmax(np.abs(x)))] < 0 else x


@tracked("init_asym", detail=lambda result: {"r": result[0].rank})
def init_asym(
    obs: AsymObservationSet,
    r: int,
    L: int = DEFAULT_L,
    eps_th: float = DEFAULT_EPS_TH,
    seed: int = 0,
) -> tuple[AsymFactors, Vector]:
    """
    Spectral initialization of (U, V, W).

    Û spans the top-r eigenspace of P_offdiag(AAᵀ), A the mode-1 unfolding of
    p⁻¹T. Each of the L trials contracts p⁻¹T along mode 1 with θ = ÛÛᵀg;
    the leading left and right singular vectors of that d2 x d3 matrix give the
    mode-2 and mode-3 directions, and z = p⁻¹T ×2 ν2 ×3 ν3 gives the mode-1
    direction z/‖z‖ with magnitude λ = ‖z‖. Trials are pruned on their mode-2
    directions and each kept trial becomes the column triple λ^{1/3}(ν1, ν2, ν3),
    which is balanced by construction.

    Returns:
        The initial factors and the magnitude estimates of the kept trials.

    Raises:
        InitializationError: if pruning cannot find r factors.
    """
    d1, d2, d3 = obs.dims
    validate_rank(r, d1, "init_asym")
    if L < r:
        raise ValueError(f"init_asym failed: L={L} must be at least r={r}.")
    if obs.num_entries == 0:
        raise ValueError("init_asym failed: observation set is empty.")

    idx, vals = obs.indices, obs.values
    B = offdiag_gram(mode1_unfolding(idx, vals / obs.p, obs.dims))
    basis = top_r_eigs(B, r, seed=_random.solver_seed(seed, 0)).basis

    draws = _random.stream(seed, _random.RETRIEVAL).standard_normal((L, d1))
    mode1: list[Vector] = []
    mode2: list[Vector] = []
    mode3: list[Vector] = []
    lams: list[float] = []
    gaps: list[float] = []
    for tau in range(L):
        theta = basis @ (basis.T @ draws[tau])
        M = contract_to_matrix(idx, vals * theta[idx[:, 0]] / obs.p, (1, 2), (d2, d3))
        pair = top_two_singular(M, seed=_random.solver_seed(seed, 1, tau))
        nu2 = _positive_peak(pair.left1)
        nu3 = _positive_peak(pair.right1)
        z = contract_to_axis(idx, vals * nu2[idx[:, 1]] * nu3[idx[:, 2]], 0, d1) / obs.p
        lam = float(np.linalg.norm(z))
        nu1 = z / lam if lam > 0 else np.eye(d1)[0]
        mode1.append(nu1)
        mode2.append(nu2)
        mode3.append(nu3)
        lams.append(lam)
        gaps.append(pair.gap)

    picks = prune_indices(mode2, gaps, r, eps_th)
    kept = np.array([lams[tau] for tau in picks])
    scale = np.cbrt(kept)
    F0 = AsymFactors(
        U=np.column_stack([mode1[tau] for tau in picks]) * scale,
        V=np.column_stack([mode2[tau] for tau in picks]) * scale,
        W=np.column_stack([mode3[tau] for tau in picks]) * scale,
    )
    logger.debug("init_asym: kept magnitudes %s", np.array2string(kept, precision=4))
    return F0, kept


__all__ = ["init_asym"]
