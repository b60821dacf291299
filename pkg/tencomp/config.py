from __future__ import annotations

import os
from dataclasses import dataclass

_DEFAULT_EIG_TOL = 1e-10
_DEFAULT_EIG_MAX_ITER = 1000
_DEFAULT_OVERSAMPLE = 8
_DEFAULT_THREADS = 1
_DEFAULT_LOG_LEVEL = "WARNING"

_ENV_VAR_EIG_TOL = "TENCOMP_EIG_TOL"
_ENV_VAR_EIG_MAX_ITER = "TENCOMP_EIG_MAX_ITER"
_ENV_VAR_OVERSAMPLE = "TENCOMP_OVERSAMPLE"
_ENV_VAR_THREADS = "TENCOMP_THREADS"
_ENV_VAR_LOG_LEVEL = "TENCOMP_LOG_LEVEL"

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class Config:
    eig_tol: float
    eig_max_iter: int
    oversample: int
    threads: int
    log_level: str


_config: Config | None = None


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"Invalid value for {name}: {raw!r} (expected a float)") from None


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Invalid value for {name}: {raw!r} (expected an integer)") from None


def configure(
    eig_tol: float | None = None,
    eig_max_iter: int | None = None,
    oversample: int | None = None,
    threads: int | None = None,
    log_level: str | None = None,
) -> None:
    """
    Configure tencomp settings.

    Every setting resolves as: argument > environment variable > built-in default.

    Args:
        eig_tol: Residual tolerance of the iterative eigen/singular solvers,
            relative to the Frobenius norm of the input matrix.
            Env: TENCOMP_EIG_TOL, default 1e-10.
        eig_max_iter: Sweep budget of the iterative solvers.
            Env: TENCOMP_EIG_MAX_ITER, default 1000.
        oversample: Extra block columns carried by subspace iteration.
            Env: TENCOMP_OVERSAMPLE, default 8.
        threads: Worker count for Monte Carlo experiments.
            Env: TENCOMP_THREADS, default 1.
        log_level: Level used when the CLI sets up logging.
            Env: TENCOMP_LOG_LEVEL, default "WARNING".
    """
    global _config

    resolved_tol = eig_tol if eig_tol is not None else _env_float(_ENV_VAR_EIG_TOL, _DEFAULT_EIG_TOL)
    resolved_max_iter = (
        eig_max_iter
        if eig_max_iter is not None
        else _env_int(_ENV_VAR_EIG_MAX_ITER, _DEFAULT_EIG_MAX_ITER)
    )
    resolved_oversample = (
        oversample if oversample is not None else _env_int(_ENV_VAR_OVERSAMPLE, _DEFAULT_OVERSAMPLE)
    )
    resolved_threads = threads if threads is not None else _env_int(_ENV_VAR_THREADS, _DEFAULT_THREADS)
    resolved_level = (
        log_level if log_level is not None else os.environ.get(_ENV_VAR_LOG_LEVEL, _DEFAULT_LOG_LEVEL)
    ).upper()

    if resolved_tol <= 0:
        raise ValueError(f"eig_tol must be positive, got {resolved_tol}")
    if resolved_max_iter < 1:
        raise ValueError(f"eig_max_iter must be at least 1, got {resolved_max_iter}")
    if resolved_oversample < 0:
        raise ValueError(f"oversample must be non-negative, got {resolved_oversample}")
    if resolved_threads < 1:
        raise ValueError(f"threads must be at least 1, got {resolved_threads}")
    if resolved_level not in _LOG_LEVELS:
        raise ValueError(f"log_level must be one of {list(_LOG_LEVELS)}, got {resolved_level!r}")

    _config = Config(
        eig_tol=resolved_tol,
        eig_max_iter=resolved_max_iter,
        oversample=resolved_oversample,
        threads=resolved_threads,
        log_level=resolved_level,
    )


def get_config() -> Config:
    global _config
    if _config is None:
        configure()
    assert _config is not None
    return _config


def reset_config() -> None:
    global _config
    _config = None
