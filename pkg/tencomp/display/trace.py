"""Checkpoint view of a gradient descent trace."""
from __future__ import annotations

import numpy as np
import pandas as pd


def trace_summary(
    trace: pd.DataFrame,
    *,
    every: int = 25,
    column: str | None = None,
) -> pd.DataFrame:
    """
    Thin a per-iteration trace to every ``every``-th iterate (plus the last).

    A ``decay`` column gives the ratio of the tracked error to its value at the
    previous checkpoint, which makes geometric convergence easy to read off.

    Args:
        trace: DataFrame with a ``t`` column, as produced by GdTrace.to_frame()
            or AsymGdTrace.to_frame().
        every: Checkpoint spacing in iterations.
        column: Error column to track. Defaults to ``rel_tensor_f`` when it has
            values, otherwise ``loss``.

    Returns:
        The checkpoint rows with an added ``decay`` column.

    Example:
        >>> trace_summary(run.trace.to_frame(), every=25)
    """
    if every < 1:
        raise ValueError(f"trace_summary failed: every must be positive, got {every}.")
    if "t" not in trace.columns:
        raise ValueError("trace_summary failed: trace has no 't' column.")
    if trace.empty:
        return trace.assign(decay=pd.Series(dtype="float64"))

    if column is None:
        has_truth = "rel_tensor_f" in trace.columns and trace["rel_tensor_f"].notna().any()
        column = "rel_tensor_f" if has_truth else "loss"
    elif column not in trace.columns:
        raise ValueError(f"trace_summary failed: column {column!r} not in trace.")

    last = int(trace["t"].iloc[-1])
    keep = (trace["t"] % every == 0) | (trace["t"] == last)
    view = trace.loc[keep].reset_index(drop=True)

    values = view[column].to_numpy(dtype=float)
    previous = np.concatenate([[np.nan], values[:-1]])
    with np.errstate(divide="ignore", invalid="ignore"):
        view["decay"] = np.where(previous > 0, values / previous, np.nan)
    return view


__all__ = ["trace_summary"]
