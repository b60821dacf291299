from __future__ import annotations

from typing import Any

import numpy as np


class DimensionMismatchError(ValueError):
    """Raised when array shapes do not line up for an operation."""

    pass


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its sweep budget."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class InitializationError(RuntimeError):
    """Raised when the retrieval stage cannot produce r distinct factors."""

    def __init__(self, message: str, found: int):
        super().__init__(message)
        self.found = found


class DivergenceError(RuntimeError):
    """Raised when gradient descent produces a non-finite iterate."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class ObservationParseError(ValueError):
    """Raised when an observation or factor file is malformed."""

    def __init__(self, message: str, path: str, line: int | None = None):
        super().__init__(message)
        self.path = path
        self.line = line


class ExperimentConfigError(ValueError):
    """Raised when an experiment configuration violates the schema."""

    pass


def as_float_array(value: Any, ndim: int, name: str, operation: str) -> np.ndarray:
    """Convert to a float64 array of the given rank, rejecting NaN/Inf."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionMismatchError(
            f"{operation} failed: '{name}' must be {ndim}-dimensional, got shape {arr.shape}."
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{operation} failed: '{name}' contains non-finite entries.")
    return arr


def validate_factor_matrix(U: Any, operation: str, name: str = "U") -> np.ndarray:
    """Validate a d x r factor matrix with r >= 1 and finite entries."""
    arr = as_float_array(U, 2, name, operation)
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(
            f"{operation} failed: '{name}' must have at least one row and one column, "
            f"got shape {arr.shape}."
        )
    return arr


def validate_same_shape(a: np.ndarray, b: np.ndarray, operation: str) -> None:
    """Validate that two arrays have identical shapes."""
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"{operation} failed: shape {a.shape} does not match shape {b.shape}."
        )


def validate_length(vec: np.ndarray, expected: int, name: str, operation: str) -> None:
    """Validate that a vector has the contracted dimension's length."""
    if vec.shape != (expected,):
        raise DimensionMismatchError(
            f"{operation} failed: '{name}' has shape {vec.shape}, expected ({expected},)."
        )


def validate_rank(r: int, d: int, operation: str) -> None:
    """Validate 1 <= r <= d."""
    if r < 1:
        raise ValueError(f"{operation} failed: rank must be at least 1, got {r}.")
    if r > d:
        raise ValueError(f"{operation} failed: rank {r} exceeds dimension {d}.")


def validate_probability(p: float, operation: str) -> None:
    """Validate a sampling rate in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"{operation} failed: sampling rate must lie in (0, 1], got {p}.")


def validate_noise_level(sigma: float, operation: str) -> None:
    """Validate sigma >= 0."""
    if not sigma >= 0.0:
        raise ValueError(f"{operation} failed: noise level must be non-negative, got {sigma}.")
