"""Iterative dense eigen/singular kernels.

Both solvers run blocked subspace (orthogonal) iteration from a seeded Gaussian
start with a Rayleigh-Ritz projection every sweep. The block carries
``get_config().oversample`` extra columns; when the block covers the whole space
the first sweep is already exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .._types import Matrix, Vector
from ..config import get_config
from ._validation import (
    ConvergenceError,
    DimensionMismatchError,
    as_float_array,
    validate_rank,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigResult:
    """Leading eigenpairs, values in descending algebraic order."""

    values: Vector
    basis: Matrix
    iterations: int = 0


@dataclass(frozen=True)
class SingularPair:
    """Two largest singular values and the leading singular vectors."""

    sigma1: float
    sigma2: float
    left1: Vector
    right1: Vector
    gap: float
    iterations: int = 0


def _resolve(tol: float | None, max_iter: int | None) -> tuple[float, int]:
    config = get_config()
    return (
        config.eig_tol if tol is None else tol,
        config.eig_max_iter if max_iter is None else max_iter,
    )


def top_r_eigs(
    S: Matrix,
    r: int,
    tol: float | None = None,
    max_iter: int | None = None,
    seed: int = 0,
) -> EigResult:
    """
    The r eigenpairs of largest algebraic eigenvalue of a symmetric matrix.

    Converged when every returned pair has ‖S q − λ q‖₂ ≤ tol·‖S‖_F. Each sweep
    shifts by the most negative Ritz value seen so that large negative
    eigenvalues do not crowd the block.

    Args:
        S: Symmetric d x d matrix.
        r: Number of pairs, 1 <= r <= d.
        tol: Relative residual tolerance (default from config).
        max_iter: Sweep budget (default from config).
        seed: Seed of the Gaussian starting block.

    Raises:
        ConvergenceError: if the budget is exhausted.
    """
    S = as_float_array(S, 2, "S", "top_r_eigs")
    d = S.shape[0]
    if S.shape != (d, d):
        raise DimensionMismatchError(f"top_r_eigs failed: matrix must be square, got {S.shape}.")
    validate_rank(r, d, "top_r_eigs")
    scale = float(np.linalg.norm(S))
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise ValueError("top_r_eigs failed: matrix is not symmetric.")
    tol, max_iter = _resolve(tol, max_iter)

    if scale == 0.0:
        return EigResult(values=np.zeros(r), basis=np.eye(d)[:, :r], iterations=0)

    k = min(d, r + get_config().oversample)
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, k)))

    worst = np.inf
    for it in range(1, max_iter + 1):
        Z = S @ Q
        H = Q.T @ Z
        H = (H + H.T) / 2
        w, Y = np.linalg.eigh(H)
        w, Y = w[::-1], Y[:, ::-1]
        X = Q @ Y
        SX = Z @ Y

        worst = float(np.max(np.linalg.norm(SX[:, :r] - X[:, :r] * w[:r], axis=0)))
        if worst <= tol * scale:
            logger.debug("top_r_eigs converged in %d sweeps (d=%d, r=%d)", it, d, r)
            return EigResult(values=w[:r].copy(), basis=X[:, :r].copy(), iterations=it)

        shift = max(0.0, -float(w[-1]))
        Q, _ = np.linalg.qr(SX + shift * X)

    raise ConvergenceError(
        f"top_r_eigs failed: no convergence after {max_iter} sweeps "
        f"(residual {worst:.3e}, target {tol * scale:.3e}).",
        iterations=max_iter,
        residual=worst,
    )


def top_two_singular(
    M: Matrix,
    tol: float | None = None,
    max_iter: int | None = None,
    seed: int = 0,
) -> SingularPair:
    """
    Two largest singular values of M with its leading singular vectors.

    Subspace iteration on MᵀM; left vectors come from M·right/σ, so
    M·right1 = sigma1·left1 holds to roundoff. Converged when
    ‖Mᵀ·left1 − sigma1·right1‖₂ ≤ tol·‖M‖_F and sigma2 has stopped moving by more
    than tol·‖M‖_F. A gap within tol·‖M‖_F is reported as exactly 0.

    Raises:
        ConvergenceError: if the budget is exhausted.
    """
    M = as_float_array(M, 2, "M", "top_two_singular")
    m, n = M.shape
    if m == 0 or n == 0:
        raise DimensionMismatchError(f"top_two_singular failed: empty matrix {M.shape}.")
    tol, max_iter = _resolve(tol, max_iter)
    scale = float(np.linalg.norm(M))

    if scale == 0.0:
        left = np.zeros(m)
        left[0] = 1.0
        right = np.zeros(n)
        right[0] = 1.0
        return SingularPair(0.0, 0.0, left, right, gap=0.0, iterations=0)

    k = min(n, 2 + get_config().oversample)
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, k)))

    previous_sigma2 = np.inf
    residual = np.inf
    for it in range(1, max_iter + 1):
        MQ = M @ Q
        Ub, s, Vbt = np.linalg.svd(MQ, full_matrices=False)
        R = Q @ Vbt.T
        sigma1 = float(s[0])
        sigma2 = float(s[1]) if s.size > 1 else 0.0
        left1 = Ub[:, 0]
        right1 = R[:, 0]

        residual = float(np.linalg.norm(M.T @ left1 - sigma1 * right1))
        settled = abs(sigma2 - previous_sigma2) <= tol * scale
        if residual <= tol * scale and (settled or k == n):
            gap = sigma1 - sigma2
            if gap <= tol * scale:
                gap = 0.0
            return SingularPair(
                sigma1=sigma1,
                sigma2=sigma2,
                left1=left1.copy(),
                right1=right1 / np.linalg.norm(right1),
                gap=gap,
                iterations=it,
            )
        previous_sigma2 = sigma2
        Q, _ = np.linalg.qr(M.T @ (Ub * s))

    raise ConvergenceError(
        f"top_two_singular failed: no convergence after {max_iter} sweeps "
        f"(residual {residual:.3e}, target {tol * scale:.3e}).",
        iterations=max_iter,
        residual=residual,
    )


__all__ = ["EigResult", "SingularPair", "top_r_eigs", "top_two_singular"]
