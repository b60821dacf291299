from __future__ import annotations

import inspect
import time
from collections.abc import Callable
from functools import wraps
from typing import Any, TypeVar

import numpy as np

from ._tracking import get_active_session

F = TypeVar("F", bound=Callable[..., Any])


def tracked(
    operation_name: str,
    detail: Callable[[Any], dict[str, Any]] | None = None,
) -> Callable[[F], F]:
    """Decorator that records a pipeline stage in an active RunSession. No-op otherwise.

    A stage that raises is recorded with status ``"failed"`` and the exception
    type in its detail, then the exception propagates unchanged.

    Args:
        operation_name: Name of the stage for display.
        detail: Optional callable that receives the stage's return value and
            returns a small dict of facts worth showing (final loss, number of
            factors found, ...). Failures inside it are swallowed.

    Example:
        @tracked("gd_run", detail=lambda trace: {"final_loss": trace.final_loss})
        def gd_run(obs, U0, eta, t0, truth=None):
            ...
    """
    def decorator(func: F) -> F:
        signature = inspect.signature(func)

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            session = get_active_session()
            if session is None:
                return func(*args, **kwargs)

            params = _bind_params(signature, args, kwargs)
            depth = session.enter()
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                session.exit()
                session.record(
                    operation_name,
                    params,
                    (time.perf_counter() - start_time) * 1000,
                    depth=depth,
                    status="failed",
                    detail=_failure_detail(e),
                )
                raise
            session.exit()
            duration_ms = (time.perf_counter() - start_time) * 1000

            facts: dict[str, Any] = {}
            if detail is not None:
                try:
                    facts = detail(result)
                except Exception:
                    facts = {}

            session.record(operation_name, params, duration_ms, depth=depth, detail=facts)
            return result

        return wrapper  # type: ignore
    return decorator


def _failure_detail(error: Exception) -> dict[str, Any]:
    facts: dict[str, Any] = {"error": type(error).__name__}
    for attr in ("found", "iteration"):
        value = getattr(error, attr, None)
        if value is not None:
            facts[attr] = value
    return facts


def _bind_params(signature: inspect.Signature, args: tuple, kwargs: dict) -> dict[str, Any]:
    """Explicitly passed arguments by name; defaults are left out."""
    try:
        bound = signature.bind_partial(*args, **kwargs)
    except TypeError:
        return {}
    return {name: _safe_repr(value) for name, value in bound.arguments.items()}


def _safe_repr(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool, type(None))):
        return value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return f"<ndarray {value.shape}>"
    dims = getattr(value, "dims", None)
    if dims is None and isinstance(getattr(value, "d", None), int):
        dims = (value.d,) * 3
    if dims is not None:
        return f"<{type(value).__name__} {'x'.join(str(n) for n in dims)}>"
    if isinstance(value, (list, tuple)) and len(value) <= 10:
        return [_safe_repr(v) for v in value]
    return f"<{type(value).__name__}>"


__all__ = ["tracked"]
