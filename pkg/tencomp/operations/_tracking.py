from __future__ import annotations

from collections.abc import Callable
from contextvars import ContextVar
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Literal

from .._types import StageRecordDict

StageStatus = Literal["ok", "failed"]


@dataclass
class StageRecord:
    """One completed (or failed) pipeline stage.

    ``depth`` is the nesting level at which the stage ran: ``init`` called from
    ``best_of_restarts`` sits one level below it. Records are appended when a
    stage finishes, so inner stages precede the stage that called them.
    """

    operation: str
    params: dict[str, Any]
    depth: int = 0
    status: StageStatus = "ok"
    timestamp: datetime = field(default_factory=datetime.now)
    duration_ms: float | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status == "failed"

    def as_dict(self) -> StageRecordDict:
        return {
            "operation": self.operation,
            "params": dict(self.params),
            "detail": dict(self.detail),
            "depth": self.depth,
            "status": self.status,
            "timestamp": self.timestamp.isoformat(),
            "duration_ms": self.duration_ms,
        }


OnRecordCallback = Callable[[StageRecord], None]


class SessionTracker:
    """Collects stage records and the current nesting depth of tracked calls."""

    def __init__(self, on_record: OnRecordCallback | None = None):
        self.stages: list[StageRecord] = []
        self.started = datetime.now()
        self._depth = 0
        self._on_record = on_record

    def enter(self) -> int:
        depth = self._depth
        self._depth += 1
        return depth

    def exit(self) -> None:
        self._depth = max(self._depth - 1, 0)

    def record(
        self,
        operation: str,
        params: dict[str, Any],
        duration_ms: float,
        *,
        depth: int = 0,
        status: StageStatus = "ok",
        detail: dict[str, Any] | None = None,
    ) -> StageRecord:
        record = StageRecord(
            operation=operation,
            params=params,
            depth=depth,
            status=status,
            duration_ms=duration_ms,
            detail=detail or {},
        )
        self.stages.append(record)
        if self._on_record is not None:
            self._on_record(record)
        return record

    def get_history(self) -> list[StageRecord]:
        return self.stages.copy()

    def top_level_ms(self) -> float:
        """Wall time of the outermost stages; nested stages are already inside it."""
        return sum(s.duration_ms or 0.0 for s in self.stages if s.depth == 0)


_active_session: ContextVar[SessionTracker | None] = ContextVar("_active_session", default=None)


def get_active_session() -> SessionTracker | None:
    return _active_session.get()


def set_active_session(tracker: SessionTracker | None) -> None:
    _active_session.set(tracker)


def is_tracking() -> bool:
    return _active_session.get() is not None


__all__ = [
    "StageRecord",
    "StageStatus",
    "SessionTracker",
    "get_active_session",
    "set_active_session",
    "is_tracking",
]
