"""Seeded, per-purpose random streams.

Every random draw in the package goes through ``stream``. The generator for a
purpose is keyed by ``[seed, purpose, *extra]`` through numpy's SeedSequence, so
streams for different purposes (or different restarts) never overlap and do not
depend on the order in which they are created.
"""
from __future__ import annotations

import numpy as np

FACTORS = 0
MASK = 1
NOISE = 2
RETRIEVAL = 3
TPM = 4
SOLVER = 5
ASYM_FACTORS = 6


def stream(seed: int, purpose: int, *extra: int) -> np.random.Generator:
    """Return the generator for ``purpose`` under master ``seed``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence([seed, purpose, *extra]))


def solver_seed(seed: int, *extra: int) -> int:
    """Derive a 32-bit integer seed for an iterative solver start."""
    return int(stream(seed, SOLVER, *extra).integers(0, 2**31 - 1))


__all__ = [
    "FACTORS",
    "MASK",
    "NOISE",
    "RETRIEVAL",
    "TPM",
    "SOLVER",
    "ASYM_FACTORS",
    "stream",
    "solver_seed",
]
