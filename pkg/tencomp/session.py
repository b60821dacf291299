from __future__ import annotations

from typing import Any

import pandas as pd

from ._types import StageRecordDict
from .operations._tracking import (
    SessionTracker,
    StageRecord,
    set_active_session,
)

SUMMARY_COLUMNS = ["operation", "status", "detail", "duration_ms"]


def _format_detail(detail: dict[str, Any]) -> str:
    """Render stage facts compactly, floats in short scientific form."""
    parts = []
    for key, value in detail.items():
        if isinstance(value, float):
            parts.append(f"{key}={value:.3e}")
        else:
            parts.append(f"{key}={value}")
    return ", ".join(parts)


def _indented(record: StageRecord) -> str:
    return "  " * record.depth + record.operation


class RunSession:
    """
    Context manager that records the stages of a completion run.

    While active, every tracked stage (subspace estimate, initialization,
    restarts, gradient descent, ...) appends a StageRecord with its parameters,
    a few result facts, its nesting depth and its wall time. Stages that raise
    are recorded as failed, so a restart that could not prune to r factors
    still shows up.

    Example:
        with RunSession() as session:
            U0 = best_of_restarts(obs, r=4, seed=1)
            trace = gd_run(obs, U0, eta, t0=100)
        print(session.summary())

    With live output:
        with RunSession(live=True):
            best_of_restarts(obs, r=4)   # one indented line per stage
    """

    def __init__(self, live: bool = False):
        """Initialize RunSession.

        Args:
            live: If True, print one line per stage as it completes.
        """
        self.live = live
        self._tracker: SessionTracker | None = None
        self._printed = 0

    def _print_record(self, record: StageRecord) -> None:
        self._printed += 1
        line = f"[{self._printed:2d}] {_indented(record)}"
        if record.failed:
            line += " FAILED"
        if record.duration_ms is not None:
            line += f" ({record.duration_ms:.1f} ms)"
        facts = _format_detail(record.detail)
        if facts:
            line += f" {facts}"
        print(line)

    def __enter__(self) -> RunSession:
        self._tracker = SessionTracker(on_record=self._print_record if self.live else None)
        self._printed = 0
        set_active_session(self._tracker)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:  # type: ignore[no-untyped-def]
        set_active_session(None)
        return None

    @property
    def history(self) -> list[StageRecord]:
        if self._tracker is None:
            return []
        return self._tracker.get_history()

    @property
    def last_stage(self) -> StageRecord | None:
        history = self.history
        return history[-1] if history else None

    @property
    def failures(self) -> list[StageRecord]:
        """Stages that raised, innermost first."""
        return [stage for stage in self.history if stage.failed]

    @property
    def total_ms(self) -> float:
        return self._tracker.top_level_ms() if self._tracker is not None else 0.0

    def records(self) -> list[StageRecordDict]:
        """Plain-dict view of the history, suitable for JSON."""
        return [stage.as_dict() for stage in self.history]

    def summary(self) -> pd.DataFrame:
        """Stage history as a DataFrame; nested stages are indented."""
        history = self.history
        if not history:
            return pd.DataFrame(columns=SUMMARY_COLUMNS)

        return pd.DataFrame(
            [
                {
                    "operation": _indented(stage),
                    "status": stage.status,
                    "detail": _format_detail(stage.detail),
                    "duration_ms": round(stage.duration_ms, 2) if stage.duration_ms is not None else None,
                }
                for stage in history
            ],
            columns=SUMMARY_COLUMNS,
        )
