"""
Display helpers for inspecting completion runs.

Functions:
    summary: Show the stage history of a RunSession with params, facts and timing.
    trace_summary: Thin a gradient descent trace to checkpoints with decay ratios.
"""
from .summary import summary
from .trace import trace_summary

__all__ = [
    "summary",
    "trace_summary",
]
