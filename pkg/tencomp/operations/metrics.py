"""Error metrics that account for the column-permutation ambiguity of CP factors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .._types import FactorMatrix, IndexArray, MetricsDict, Tensor3
from ._validation import DimensionMismatchError, validate_factor_matrix
from .tensor import cp_compose

DEFAULT_SUCCESS_THRESHOLD = 0.01


@dataclass(frozen=True)
class FactorErrors:
    """Distances between U and U* under one matched column permutation.

    ``matched_perm[i]`` is the column of U paired with column i of U*.
    """

    dist_f: float
    dist_2inf: float
    dist_inf: float
    matched_perm: IndexArray


def _pair(U: FactorMatrix, Ustar: FactorMatrix, operation: str) -> tuple[np.ndarray, np.ndarray]:
    U = validate_factor_matrix(U, operation, "U")
    Ustar = validate_factor_matrix(Ustar, operation, "Ustar")
    if U.shape != Ustar.shape:
        raise DimensionMismatchError(
            f"{operation} failed: U has shape {U.shape} but Ustar has shape {Ustar.shape}."
        )
    return U, Ustar


def squared_distance_costs(U: FactorMatrix, Ustar: FactorMatrix) -> np.ndarray:
    """cost[a, b] = ‖u_a − u*_b‖₂²."""
    diff = U[:, :, None] - Ustar[:, None, :]
    return np.sum(diff * diff, axis=0)


def assignment_to_perm(costs: np.ndarray) -> IndexArray:
    """Exact minimum-cost matching of an r x r cost matrix, as perm[b] = a."""
    rows, cols = linear_sum_assignment(costs)
    perm = np.empty(costs.shape[1], dtype=np.int64)
    perm[cols] = rows
    return perm


def match_permutation(U: FactorMatrix, Ustar: FactorMatrix) -> IndexArray:
    """
    Column permutation of U closest to Ustar in Frobenius norm.

    Returns perm with perm[i] = index of the U column matched to u*_i, so that
    ``U[:, perm]`` is aligned with Ustar.
    """
    U, Ustar = _pair(U, Ustar, "match_permutation")
    return assignment_to_perm(squared_distance_costs(U, Ustar))


def factor_errors(U: FactorMatrix, Ustar: FactorMatrix) -> FactorErrors:
    """
    dist_F, dist_{2,∞} and dist_∞ evaluated at the dist_F-optimal permutation.

    Example:
        errs = factor_errors(U_hat, Ustar)
        errs.dist_f / np.linalg.norm(Ustar)
    """
    U, Ustar = _pair(U, Ustar, "factor_errors")
    perm = assignment_to_perm(squared_distance_costs(U, Ustar))
    D = U[:, perm] - Ustar
    return FactorErrors(
        dist_f=float(np.linalg.norm(D)),
        dist_2inf=float(np.max(np.linalg.norm(D, axis=1))),
        dist_inf=float(np.max(np.abs(D))),
        matched_perm=perm,
    )


def dense_tensor_errors(That: Tensor3, Tstar: Tensor3) -> dict[str, float]:
    """Relative F, 2,∞ (largest mode-1 slice) and ∞ errors of That against Tstar."""
    if That.shape != Tstar.shape:
        raise DimensionMismatchError(
            f"tensor_errors failed: shape {That.shape} does not match shape {Tstar.shape}."
        )
    ref_f = float(np.linalg.norm(Tstar))
    if ref_f == 0.0:
        raise ValueError("tensor_errors failed: reference tensor is identically zero.")
    E = That - Tstar
    rows = Tstar.reshape(Tstar.shape[0], -1)
    erows = E.reshape(E.shape[0], -1)
    return {
        "rel_tensor_f": float(np.linalg.norm(E)) / ref_f,
        "rel_tensor_2inf": float(np.max(np.linalg.norm(erows, axis=1)))
        / float(np.max(np.linalg.norm(rows, axis=1))),
        "rel_tensor_inf": float(np.max(np.abs(E))) / float(np.max(np.abs(Tstar))),
    }


def tensor_errors(U: FactorMatrix, Ustar: FactorMatrix) -> tuple[float, float]:
    """
    (‖T̂ − T*‖_F / ‖T*‖_F, ‖T̂ − T*‖∞ / ‖T*‖∞) with T̂ = cp_compose(U).

    Raises:
        ValueError: if cp_compose(Ustar) is identically zero.
    """
    U, Ustar = _pair(U, Ustar, "tensor_errors")
    errs = dense_tensor_errors(cp_compose(U), cp_compose(Ustar))
    return errs["rel_tensor_f"], errs["rel_tensor_inf"]


def relative_dist_f(U: FactorMatrix, Ustar: FactorMatrix) -> float:
    U, Ustar = _pair(U, Ustar, "success")
    return factor_errors(U, Ustar).dist_f / float(np.linalg.norm(Ustar))


def success(U: FactorMatrix, Ustar: FactorMatrix, threshold: float = DEFAULT_SUCCESS_THRESHOLD) -> bool:
    """True iff dist_F(U, U*) / ‖U*‖_F <= threshold."""
    return relative_dist_f(U, Ustar) <= threshold


def two_inf(U: FactorMatrix) -> float:
    """Largest row ℓ2 norm."""
    return float(np.max(np.linalg.norm(U, axis=1)))


def metrics_record(
    U: FactorMatrix,
    Ustar: FactorMatrix,
    threshold: float = DEFAULT_SUCCESS_THRESHOLD,
) -> MetricsDict:
    """Everything metrics.json holds for a symmetric estimate."""
    errs = factor_errors(U, Ustar)
    rel_f, rel_inf = tensor_errors(U, Ustar)
    return {
        "dist_f": errs.dist_f,
        "dist_2inf": errs.dist_2inf,
        "dist_inf": errs.dist_inf,
        "rel_tensor_f": rel_f,
        "rel_tensor_inf": rel_inf,
        "success": bool(errs.dist_f / float(np.linalg.norm(Ustar)) <= threshold),
    }


__all__ = [
    "DEFAULT_SUCCESS_THRESHOLD",
    "FactorErrors",
    "squared_distance_costs",
    "assignment_to_perm",
    "match_permutation",
    "factor_errors",
    "dense_tensor_errors",
    "tensor_errors",
    "relative_dist_f",
    "success",
    "two_inf",
    "metrics_record",
]
