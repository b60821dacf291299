"""CLI for tencomp."""
from .main import cli

__all__ = ["cli"]
