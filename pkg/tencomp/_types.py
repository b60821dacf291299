from __future__ import annotations

from typing import Any, Literal, TypedDict

import numpy as np
import numpy.typing as npt

# Dense float64 arrays. Invariants are enforced by operations._validation.
Vector = npt.NDArray[np.float64]
Matrix = npt.NDArray[np.float64]
Tensor3 = npt.NDArray[np.float64]
SymTensor3 = npt.NDArray[np.float64]
FactorMatrix = npt.NDArray[np.float64]
IndexArray = npt.NDArray[np.int64]

Axis = Literal[1, 2, 3]
ExperimentKind = Literal["convergence", "phase", "rank", "snr", "asym-convergence"]
InitMethod = Literal["spectral", "tpm"]


class StageRecordDict(TypedDict):
    operation: str
    params: dict[str, Any]
    detail: dict[str, Any]
    depth: int
    status: str
    timestamp: str
    duration_ms: float | None


class MetricsDict(TypedDict):
    dist_f: float
    dist_2inf: float
    dist_inf: float
    rel_tensor_f: float
    rel_tensor_inf: float
    success: bool


class ManifestDict(TypedDict):
    d: int
    r_hint: int | None
    p: float
    sigma: float
    seed: int
    num_canonical: int


class AsymManifestDict(TypedDict):
    d1: int
    d2: int
    d3: int
    p: float
    sigma: float
    seed: int
    num_entries: int
