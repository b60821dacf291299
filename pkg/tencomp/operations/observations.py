"""Observed-entry containers for the symmetric and asymmetric models."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from .._types import IndexArray, Vector
from ._validation import (
    DimensionMismatchError,
    validate_noise_level,
    validate_probability,
)


def _sorted_entries(indices: Any, values: Any, operation: str) -> tuple[IndexArray, Vector]:
    idx = np.asarray(indices, dtype=np.int64).reshape(-1, 3)
    vals = np.asarray(values, dtype=np.float64).reshape(-1)
    if idx.shape[0] != vals.shape[0]:
        raise DimensionMismatchError(
            f"{operation} failed: {idx.shape[0]} index triples but {vals.shape[0]} values."
        )
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"{operation} failed: observed values must be finite.")
    order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0]))
    return idx[order].copy(), vals[order].copy()


def _check_distinct(idx: IndexArray, operation: str) -> None:
    if idx.shape[0] > 1:
        dup = np.all(idx[1:] == idx[:-1], axis=1)
        if np.any(dup):
            first = tuple(int(x) for x in idx[1:][dup][0])
            raise ValueError(f"{operation} failed: triple {first} listed more than once.")


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """
    Sampled entries of a symmetric order-3 tensor.

    Only canonical triples (i <= j <= k) are stored, sorted lexicographically.
    The full observed set is the orbit of each triple under index permutation,
    all carrying the same value; ``expanded_indices`` / ``expanded_values`` hold
    that union once per distinct cell.

    Example:
        obs = ObservationSet(d=3, p=1.0, sigma=0.0, seed=0,
                             indices=[[0, 0, 1]], values=[2.5])
        obs.expanded_indices   # (0,0,1), (0,1,0), (1,0,0)
    """

    d: int
    p: float
    sigma: float
    seed: int
    indices: IndexArray
    values: Vector
    r_hint: int | None = None

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"ObservationSet failed: d must be positive, got {self.d}.")
        validate_probability(self.p, "ObservationSet")
        validate_noise_level(self.sigma, "ObservationSet")
        idx, vals = _sorted_entries(self.indices, self.values, "ObservationSet")
        if idx.size and (idx.min() < 0 or idx.max() >= self.d):
            raise ValueError(f"ObservationSet failed: indices must lie in [0, {self.d}).")
        if np.any((idx[:, 0] > idx[:, 1]) | (idx[:, 1] > idx[:, 2])):
            raise ValueError("ObservationSet failed: triples must be canonical (i <= j <= k).")
        _check_distinct(idx, "ObservationSet")
        idx.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @property
    def num_canonical(self) -> int:
        return int(self.indices.shape[0])

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.d, self.d, self.d)

    @cached_property
    def _expansion(self) -> tuple[IndexArray, Vector]:
        d = self.d
        n = self.num_canonical
        if n == 0:
            return np.empty((0, 3), dtype=np.int64), np.empty(0)
        perms = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
        cells = np.concatenate([self.indices[:, list(p)] for p in perms])
        orbit = np.tile(np.arange(n), len(perms))
        flat = (cells[:, 0] * d + cells[:, 1]) * d + cells[:, 2]
        _, first = np.unique(flat, return_index=True)
        idx = cells[first]
        vals = self.values[orbit[first]]
        idx.flags.writeable = False
        vals.flags.writeable = False
        return idx, vals

    @property
    def expanded_indices(self) -> IndexArray:
        return self._expansion[0]

    @property
    def expanded_values(self) -> Vector:
        return self._expansion[1]

    def to_dense(self) -> np.ndarray:
        """Symmetrized observed tensor with zeros off the mask."""
        T = np.zeros((self.d, self.d, self.d))
        idx = self.expanded_indices
        T[idx[:, 0], idx[:, 1], idx[:, 2]] = self.expanded_values
        return T

    def mask(self) -> np.ndarray:
        """Boolean observed-cell indicator over the full d x d x d grid."""
        M = np.zeros((self.d, self.d, self.d), dtype=bool)
        idx = self.expanded_indices
        M[idx[:, 0], idx[:, 1], idx[:, 2]] = True
        return M

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return (
            self.d == other.d
            and self.p == other.p
            and self.sigma == other.sigma
            and self.seed == other.seed
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class AsymObservationSet:
    """Sampled entries of a general d1 x d2 x d3 tensor; no symmetrization."""

    dims: tuple[int, int, int]
    p: float
    sigma: float
    seed: int
    indices: IndexArray
    values: Vector

    def __post_init__(self) -> None:
        dims = tuple(int(x) for x in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError(f"AsymObservationSet failed: dims must be 3 positive ints, got {self.dims}.")
        validate_probability(self.p, "AsymObservationSet")
        validate_noise_level(self.sigma, "AsymObservationSet")
        idx, vals = _sorted_entries(self.indices, self.values, "AsymObservationSet")
        if idx.size and (idx.min() < 0 or np.any(idx.max(axis=0) >= np.array(dims))):
            raise ValueError(f"AsymObservationSet failed: indices out of range for dims {dims}.")
        _check_distinct(idx, "AsymObservationSet")
        idx.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @property
    def num_entries(self) -> int:
        return int(self.indices.shape[0])

    def to_dense(self) -> np.ndarray:
        T = np.zeros(self.dims)
        T[self.indices[:, 0], self.indices[:, 1], self.indices[:, 2]] = self.values
        return T

    def mask(self) -> np.ndarray:
        M = np.zeros(self.dims, dtype=bool)
        M[self.indices[:, 0], self.indices[:, 1], self.indices[:, 2]] = True
        return M

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AsymObservationSet):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.p == other.p
            and self.sigma == other.sigma
            and self.seed == other.seed
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


__all__ = ["ObservationSet", "AsymObservationSet"]
