"""Per-grid-point summaries of experiment rows."""
from __future__ import annotations

import numpy as np
import pandas as pd

GROUP_KEYS = ["grid_index", "grid_value", "method"]


def aggregate_rows(rows: pd.DataFrame, metric_columns: list[str]) -> pd.DataFrame:
    """
    Summarize rows per (grid point, method).

    ``success_rate`` is successes / trials counting failed trials as
    unsuccessful. Means and medians skip failed trials; ``mean_sq_<col>`` is the
    mean squared value of each error column.

    Returns:
        One row per grid point and method, in grid order.
    """
    error_columns = [col for col in metric_columns if col != "final_loss"]
    columns = GROUP_KEYS + ["trials", "successes", "failures", "success_rate"]
    for col in metric_columns:
        columns += [f"mean_{col}", f"median_{col}"]
    columns += [f"mean_sq_{col}" for col in error_columns]

    if rows.empty:
        return pd.DataFrame(columns=columns)

    records = []
    for (grid_index, grid_value, method), group in rows.groupby(GROUP_KEYS, sort=True):
        trials = len(group)
        successes = int(group["success"].sum())
        record: dict[str, object] = {
            "grid_index": grid_index,
            "grid_value": grid_value,
            "method": method,
            "trials": trials,
            "successes": successes,
            "failures": int((group["error"] != "").sum()),
            "success_rate": successes / trials,
        }
        for col in metric_columns:
            record[f"mean_{col}"] = group[col].mean()
            record[f"median_{col}"] = group[col].median()
        for col in error_columns:
            record[f"mean_sq_{col}"] = (group[col] ** 2).mean()
        records.append(record)
    return pd.DataFrame(records, columns=columns)


def snr_slope(aggregate: pd.DataFrame, column: str = "mean_sq_rel_dist_f") -> float:
    """
    Least-squares slope of log(column) against log(SNR).

    Infinite SNR points and non-positive values are skipped.

    Raises:
        ValueError: if fewer than two usable grid points remain.
    """
    if column not in aggregate.columns:
        raise ValueError(f"snr_slope failed: column {column!r} not in aggregate.")
    snr = aggregate["grid_value"].to_numpy(dtype=float)
    values = aggregate[column].to_numpy(dtype=float)
    usable = np.isfinite(snr) & (snr > 0) & np.isfinite(values) & (values > 0)
    if usable.sum() < 2:
        raise ValueError("snr_slope failed: need at least two finite SNR points with positive errors.")
    slope, _intercept = np.polyfit(np.log(snr[usable]), np.log(values[usable]), 1)
    return float(slope)


__all__ = ["GROUP_KEYS", "aggregate_rows", "snr_slope"]
