"""Contractions over an explicit list of observed entries.

An observed tensor is carried as ``(idx, values, dims)``: ``idx`` is an (n, 3)
integer array of cell coordinates and ``values`` the matching entries; every
cell not listed is zero. Reductions use ``np.bincount`` and scipy sparse
products, both of which sum in a fixed order, so results depend only on the
entry order (callers keep entries sorted).
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .._types import FactorMatrix, IndexArray, Matrix, Vector


def cp_values(idx: IndexArray, U: FactorMatrix, V: FactorMatrix, W: FactorMatrix) -> Vector:
    """[Σ_r u_r ⊗ v_r ⊗ w_r] evaluated at each listed cell."""
    return np.einsum("nr,nr,nr->n", U[idx[:, 0]], V[idx[:, 1]], W[idx[:, 2]])


def contract_to_axis(idx: IndexArray, weights: Vector, axis: int, size: int) -> Vector:
    """out[m] = Σ weights over cells whose coordinate on 0-based ``axis`` is m."""
    return np.bincount(idx[:, axis], weights=weights, minlength=size)


def contract_to_matrix(
    idx: IndexArray,
    weights: Vector,
    axes: tuple[int, int],
    shape: tuple[int, int],
) -> Matrix:
    """out[a, b] = Σ weights over cells with coordinates (a, b) on the two 0-based ``axes``."""
    a, b = axes
    flat = idx[:, a] * shape[1] + idx[:, b]
    return np.bincount(flat, weights=weights, minlength=shape[0] * shape[1]).reshape(shape)


def factor_rows_gradient(
    idx: IndexArray,
    residual: Vector,
    out_axis: int,
    A: FactorMatrix,
    B: FactorMatrix,
    size: int,
) -> Matrix:
    """
    Column-wise ``P_Ω(R) ×seq A ×seq B`` landing on ``out_axis``.

    Column r of the result is Σ residual·A[idx_a, r]·B[idx_b, r] binned by the
    coordinate on ``out_axis``, where idx_a and idx_b are the two remaining axes in
    increasing order.
    """
    others = [ax for ax in (0, 1, 2) if ax != out_axis]
    left = A[idx[:, others[0]]]
    right = B[idx[:, others[1]]]
    rank = A.shape[1]
    out = np.empty((size, rank))
    for col in range(rank):
        out[:, col] = np.bincount(
            idx[:, out_axis],
            weights=residual * left[:, col] * right[:, col],
            minlength=size,
        )
    return out


def rank_one_inner(idx: IndexArray, values: Vector, u: Vector, v: Vector, w: Vector) -> float:
    """⟨T, u ⊗ v ⊗ w⟩ with T supported on the listed cells."""
    return float(np.dot(values, u[idx[:, 0]] * v[idx[:, 1]] * w[idx[:, 2]]))


def mode1_unfolding(idx: IndexArray, values: Vector, dims: tuple[int, int, int]) -> sp.csr_matrix:
    """Sparse mode-1 unfolding: entry (i, j * d3 + k) holds T[i, j, k]."""
    d1, d2, d3 = dims
    cols = idx[:, 1] * d3 + idx[:, 2]
    return sp.csr_matrix((values, (idx[:, 0], cols)), shape=(d1, d2 * d3))


def offdiag_gram(A: sp.csr_matrix) -> Matrix:
    """P_offdiag(A Aᵀ) as a dense, exactly symmetric matrix."""
    G = (A @ A.T).toarray()
    G = (G + G.T) / 2
    np.fill_diagonal(G, 0.0)
    return G


__all__ = [
    "cp_values",
    "contract_to_axis",
    "contract_to_matrix",
    "factor_rows_gradient",
    "rank_one_inner",
    "mode1_unfolding",
    "offdiag_gram",
]
