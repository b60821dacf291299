"""Stage table for a RunSession: parameters, outcome, facts and time share."""
from __future__ import annotations

from typing import TYPE_CHECKING, Any

import pandas as pd

from ..session import _format_detail

if TYPE_CHECKING:
    from ..session import RunSession


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    if isinstance(value, list):
        if len(value) > 3:
            return f"[{_format_value(value[0])}, {_format_value(value[1])}, ... +{len(value) - 2}]"
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    if isinstance(value, str) and value.startswith("<") and value.endswith(">"):
        return value
    return repr(value)


def _format_params(params: dict[str, Any], max_length: int = 50) -> str:
    """Format parameters as ``name=value`` pairs, cut to ``max_length``."""
    text = ", ".join(f"{key}={_format_value(value)}" for key, value in params.items())
    if len(text) > max_length:
        text = text[: max_length - 3] + "..."
    return text


def summary(
    session: RunSession,
    *,
    include_params: bool = True,
) -> pd.DataFrame:
    """
    Stage table of a session, one numbered row per recorded stage.

    Nested stages are indented under their caller. ``share`` is each stage's
    fraction of the wall time spent in top-level stages, so an inner stage's
    share is the part of its caller it accounts for.

    Args:
        session: The RunSession to summarize.
        include_params: Whether to include formatted parameters.

    Returns:
        DataFrame with columns ``#``, ``operation``, [``params``], ``status``,
        ``detail``, ``duration_ms`` and ``share``.
    """
    columns = ["#", "operation", "status", "detail", "duration_ms", "share"]
    if include_params:
        columns.insert(2, "params")

    history = session.history
    if not history:
        return pd.DataFrame(columns=columns)

    total_ms = session.total_ms
    rows = []
    for number, stage in enumerate(history, start=1):
        duration = stage.duration_ms or 0.0
        rows.append(
            {
                "#": number,
                "operation": "  " * stage.depth + stage.operation,
                "params": _format_params(stage.params),
                "status": stage.status,
                "detail": _format_detail(stage.detail),
                "duration_ms": round(duration, 2),
                "share": f"{duration / total_ms:.1%}" if total_ms > 0 else "N/A",
            }
        )
    return pd.DataFrame(rows)[columns]
