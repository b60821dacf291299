"""Dense order-3 tensor primitives.

Layout is numpy row-major. The mode-1 unfolding maps ``T[i, j, k]`` to column
``j * d3 + k``; every module that unfolds uses this convention. All functions
are pure and return fresh arrays.
"""
from __future__ import annotations

import numpy as np

from .._types import Axis, FactorMatrix, Matrix, SymTensor3, Tensor3, Vector
from ._validation import (
    DimensionMismatchError,
    as_float_array,
    validate_factor_matrix,
    validate_length,
    validate_same_shape,
)

_AXIS_LETTERS = {1: "i", 2: "j", 3: "k"}


def _tensor(T: Tensor3, operation: str) -> np.ndarray:
    return as_float_array(T, 3, "T", operation)


def _vector(u: Vector, name: str, operation: str) -> np.ndarray:
    return as_float_array(u, 1, name, operation)


def _check_axis(axis: int, operation: str) -> None:
    if axis not in _AXIS_LETTERS:
        raise ValueError(f"{operation} failed: axis must be 1, 2 or 3, got {axis}.")


def outer3(u: Vector, v: Vector, w: Vector) -> Tensor3:
    """
    Outer product u ⊗ v ⊗ w.

    Example:
        outer3(np.array([1.0, 2.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    """
    u = _vector(u, "u", "outer3")
    v = _vector(v, "v", "outer3")
    w = _vector(w, "w", "outer3")
    return np.einsum("i,j,k->ijk", u, v, w)


def symmetric_index_map(d: int) -> np.ndarray:
    """
    Flat index of the sorted (canonical) representative of every cell.

    ``T.ravel()[symmetric_index_map(d)]`` copies each orbit's canonical value
    into all of its permutations.
    """
    idx = np.arange(d, dtype=np.intp)
    i = idx[:, None, None]
    j = idx[None, :, None]
    k = idx[None, None, :]
    lo = np.minimum(np.minimum(i, j), k)
    hi = np.maximum(np.maximum(i, j), k)
    mid = i + j + k - lo - hi
    return (lo * d + mid) * d + hi


def cp_compose(U: FactorMatrix) -> SymTensor3:
    """
    Symmetric CP tensor Σ_i u_i ⊗ u_i ⊗ u_i from the columns of U.

    The value of each orbit is computed once, at its canonical position, and
    written to all six permutations, so the result is exactly symmetric.
    """
    U = validate_factor_matrix(U, "cp_compose")
    d = U.shape[0]
    raw = np.einsum("ir,jr,kr->ijk", U, U, U)
    return raw.ravel()[symmetric_index_map(d)]


def cp_compose_asym(U: FactorMatrix, V: FactorMatrix, W: FactorMatrix) -> Tensor3:
    """Asymmetric CP tensor Σ_i u_i ⊗ v_i ⊗ w_i."""
    U = validate_factor_matrix(U, "cp_compose_asym", "U")
    V = validate_factor_matrix(V, "cp_compose_asym", "V")
    W = validate_factor_matrix(W, "cp_compose_asym", "W")
    if not U.shape[1] == V.shape[1] == W.shape[1]:
        raise DimensionMismatchError(
            f"cp_compose_asym failed: column counts differ "
            f"({U.shape[1]}, {V.shape[1]}, {W.shape[1]})."
        )
    return np.einsum("ir,jr,kr->ijk", U, V, W)


def mode_product(T: Tensor3, axis: Axis, u: Vector) -> Matrix:
    """
    Contract T with u along one axis (1-based), returning the remaining matrix.

    axis=3 gives result[i, j] = Σ_k T[i, j, k] u_k; axes 1 and 2 are analogous
    and keep the remaining axes in their original order.
    """
    T = _tensor(T, "mode_product")
    u = _vector(u, "u", "mode_product")
    _check_axis(axis, "mode_product")
    validate_length(u, T.shape[axis - 1], "u", "mode_product")
    letters = "ijk"
    kept = letters.replace(_AXIS_LETTERS[axis], "")
    return np.einsum(f"ijk,{_AXIS_LETTERS[axis]}->{kept}", T, u)


def mode_product2(T: Tensor3, axes: tuple[int, int], u: Vector, v: Vector) -> Vector:
    """
    Contract T with u along axes[0] and with v along axes[1].

    axes=(1, 2) gives result[k] = Σ_{i,j} T[i, j, k] u_i v_j.
    """
    T = _tensor(T, "mode_product2")
    u = _vector(u, "u", "mode_product2")
    v = _vector(v, "v", "mode_product2")
    a, b = axes
    _check_axis(a, "mode_product2")
    _check_axis(b, "mode_product2")
    if a == b:
        raise ValueError(f"mode_product2 failed: axes must differ, got {axes}.")
    validate_length(u, T.shape[a - 1], "u", "mode_product2")
    validate_length(v, T.shape[b - 1], "v", "mode_product2")
    la, lb = _AXIS_LETTERS[a], _AXIS_LETTERS[b]
    kept = "ijk".replace(la, "").replace(lb, "")
    return np.einsum(f"ijk,{la},{lb}->{kept}", T, u, v)


def seq_product(T: Tensor3, U: FactorMatrix, V: FactorMatrix) -> Matrix:
    """
    Column-wise paired contraction T ×1seq U ×2seq V.

    Column i of the result is mode_product2(T, (1, 2), u_i, v_i).
    """
    T = _tensor(T, "seq_product")
    U = validate_factor_matrix(U, "seq_product", "U")
    V = validate_factor_matrix(V, "seq_product", "V")
    if U.shape[0] != T.shape[0] or V.shape[0] != T.shape[1]:
        raise DimensionMismatchError(
            f"seq_product failed: factor rows ({U.shape[0]}, {V.shape[0]}) do not match "
            f"tensor axes ({T.shape[0]}, {T.shape[1]})."
        )
    if U.shape[1] != V.shape[1]:
        raise DimensionMismatchError(
            f"seq_product failed: U has {U.shape[1]} columns but V has {V.shape[1]}."
        )
    return np.einsum("ijk,ir,jr->kr", T, U, V)


def unfold1(T: Tensor3) -> Matrix:
    """Mode-1 matricization: result[i, j * d3 + k] = T[i, j, k]."""
    T = _tensor(T, "unfold1")
    d1, d2, d3 = T.shape
    return T.reshape(d1, d2 * d3).copy()


def fold1(A: Matrix, dims: tuple[int, int, int]) -> Tensor3:
    """Inverse of unfold1."""
    A = as_float_array(A, 2, "A", "fold1")
    d1, d2, d3 = dims
    if A.shape != (d1, d2 * d3):
        raise DimensionMismatchError(
            f"fold1 failed: matrix shape {A.shape} does not match dims {dims}."
        )
    return A.reshape(d1, d2, d3).copy()


def inner(T: Tensor3, R: Tensor3) -> float:
    """Entrywise inner product Σ T[i,j,k] R[i,j,k]."""
    T = _tensor(T, "inner")
    R = as_float_array(R, 3, "R", "inner")
    validate_same_shape(T, R, "inner")
    return float(np.dot(T.ravel(), R.ravel()))


def frob_norm(T: Tensor3) -> float:
    """Frobenius norm, the square root of inner(T, T)."""
    T = _tensor(T, "frob_norm")
    return float(np.sqrt(np.dot(T.ravel(), T.ravel())))


def inf_norm(T: Tensor3) -> float:
    """Largest absolute entry."""
    T = _tensor(T, "inf_norm")
    return float(np.max(np.abs(T))) if T.size else 0.0


def two_inf_norm(T: Tensor3) -> float:
    """Largest row norm of the mode-1 unfolding."""
    T = _tensor(T, "two_inf_norm")
    return float(np.max(np.linalg.norm(T.reshape(T.shape[0], -1), axis=1)))


def is_symmetric(T: Tensor3) -> bool:
    """Exact check that T equals all six of its index permutations."""
    T = _tensor(T, "is_symmetric")
    if not T.shape[0] == T.shape[1] == T.shape[2]:
        return False
    return all(
        np.array_equal(T, np.transpose(T, perm))
        for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
    )


__all__ = [
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
    "symmetric_index_map",
]
