"""Monte Carlo experiment configuration: JSON loading and validation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, get_args

from .._types import ExperimentKind
from ..operations._validation import ExperimentConfigError
from ..operations.initialization import DEFAULT_EPS_TH, DEFAULT_T_INIT
from ..operations.metrics import DEFAULT_SUCCESS_THRESHOLD

EXPERIMENT_KINDS: tuple[str, ...] = get_args(ExperimentKind)
SYMMETRIC_KINDS = ("convergence", "phase", "rank", "snr")
CONVERGENCE_KINDS = ("convergence", "asym-convergence")
SNR_KINDS = ("snr", *CONVERGENCE_KINDS)

DEFAULT_P_GRID = tuple(round(0.01 * k, 2) for k in range(1, 11))
DEFAULT_R_GRID = tuple(range(1, 11))
DEFAULT_SNR_GRID = (1.0, 3.0, 10.0, 30.0, 100.0)
NOISELESS_GRID = (math.inf,)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One Monte Carlo sweep.

    The swept quantity depends on ``kind``:

    - ``phase``: sampling rate, ``p_grid``
    - ``rank``: CP rank, ``r_grid``; p = r·d^{-3/2}·ln²d and L = r² per point
    - ``snr``: signal-to-noise ratio, ``snr_grid``
    - ``convergence`` / ``asym-convergence``: SNR as well, noiseless by default;
      per-iteration traces are kept

    ``L`` and ``eta`` default per kind when left as None: L is 16 for symmetric
    sweeps and r² for the rank sweep and asymmetric runs; eta is 0.2
    (symmetric) or 1.0 (asymmetric), both dimensionless.

    ``sigma`` only sets the noise of phase and rank sweeps. The SNR-driven
    kinds derive it from each grid value, so a non-zero ``sigma`` there is
    rejected.
    """

    kind: ExperimentKind
    d: int = 100
    dims: tuple[int, int, int] | None = None
    r: int = 4
    p: float = 0.1
    sigma: float = 0.0
    p_grid: tuple[float, ...] | None = None
    r_grid: tuple[int, ...] | None = None
    snr_grid: tuple[float, ...] | None = None
    trials: int = 100
    base_seed: int = 0
    L: int | None = None
    eps_th: float = DEFAULT_EPS_TH
    t_init: int = DEFAULT_T_INIT
    eta: float | None = None
    t0: int = 100
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD
    extra: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        self._validate()

    @property
    def is_asym(self) -> bool:
        return self.kind == "asym-convergence"

    @property
    def tensor_dims(self) -> tuple[int, int, int]:
        if self.dims is not None:
            return self.dims
        return (self.d, self.d, self.d)

    def grid(self) -> tuple[float, ...]:
        """Values swept by this experiment, in grid-index order."""
        if self.kind == "phase":
            return tuple(self.p_grid or DEFAULT_P_GRID)
        if self.kind == "rank":
            return tuple(float(r) for r in (self.r_grid or DEFAULT_R_GRID))
        if self.kind == "snr":
            return tuple(self.snr_grid or DEFAULT_SNR_GRID)
        return tuple(self.snr_grid or NOISELESS_GRID)

    def _validate(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ExperimentConfigError(
                f"experiment config failed: kind must be one of {list(EXPERIMENT_KINDS)}, got {self.kind!r}."
            )
        if self.trials < 1:
            raise ExperimentConfigError(f"experiment config failed: trials must be >= 1, got {self.trials}.")
        if self.d < 1 or self.r < 1:
            raise ExperimentConfigError("experiment config failed: d and r must be positive.")
        if self.dims is not None and (len(self.dims) != 3 or min(self.dims) < 1):
            raise ExperimentConfigError(f"experiment config failed: dims must be three positive ints, got {self.dims}.")
        if self.dims is not None and not self.is_asym:
            raise ExperimentConfigError("experiment config failed: dims only applies to asym-convergence.")
        if self.r > min(self.tensor_dims):
            raise ExperimentConfigError(f"experiment config failed: r={self.r} exceeds the tensor dimensions.")
        if not 0 < self.p <= 1:
            raise ExperimentConfigError(f"experiment config failed: p must be in (0, 1], got {self.p}.")
        if self.sigma < 0:
            raise ExperimentConfigError(f"experiment config failed: sigma must be non-negative, got {self.sigma}.")
        if self.sigma > 0 and self.kind in SNR_KINDS:
            raise ExperimentConfigError(
                f"experiment config failed: sigma does not apply to {self.kind}; set the noise through snr_grid."
            )
        for name in ("p_grid", "r_grid", "snr_grid"):
            value = getattr(self, name)
            if value is not None and len(value) == 0:
                raise ExperimentConfigError(f"experiment config failed: {name} must not be empty.")
        if any(not 0 < p <= 1 for p in self.p_grid or ()):
            raise ExperimentConfigError("experiment config failed: every p_grid rate must be in (0, 1].")
        if any(r < 1 or r > self.d for r in self.r_grid or ()):
            raise ExperimentConfigError(f"experiment config failed: r_grid values must be in [1, {self.d}].")
        if any(not snr > 0 for snr in self.snr_grid or ()):
            raise ExperimentConfigError("experiment config failed: snr_grid values must be positive.")
        if self.L is not None and self.L < 1:
            raise ExperimentConfigError(f"experiment config failed: L must be positive, got {self.L}.")
        if not 0 < self.eps_th < 1:
            raise ExperimentConfigError(f"experiment config failed: eps_th must be in (0, 1), got {self.eps_th}.")
        if self.t_init < 1 or self.t0 < 0:
            raise ExperimentConfigError("experiment config failed: t_init must be >= 1 and t0 >= 0.")
        if self.eta is not None and not self.eta >= 0:
            raise ExperimentConfigError(f"experiment config failed: eta must be non-negative, got {self.eta}.")
        if not self.success_threshold > 0:
            raise ExperimentConfigError("experiment config failed: success_threshold must be positive.")
        if self.extra:
            raise ExperimentConfigError(
                f"experiment config failed: unknown fields {sorted(self.extra)}."
            )


def _as_float(value: Any, name: str) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ExperimentConfigError(f"experiment config failed: {name} must be a number, got {value!r}.")
    return float(value)


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ExperimentConfigError(f"experiment config failed: {name} must be an integer, got {value!r}.")
    return value


def _as_list(value: Any, name: str) -> list[Any]:
    if not isinstance(value, list):
        raise ExperimentConfigError(f"experiment config failed: {name} must be a list, got {value!r}.")
    return value


_INT_FIELDS = ("d", "r", "trials", "base_seed", "L", "t_init", "t0")
_FLOAT_FIELDS = ("p", "sigma", "eps_th", "eta", "success_threshold")


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    """
    Build an ExperimentConfig from parsed JSON.

    Keys are the snake_case field names. Grid values may use the string "inf"
    (or JSON Infinity) for a noiseless SNR.

    Raises:
        ExperimentConfigError: on a missing kind, unknown keys or ill-typed values.
    """
    if not isinstance(raw, dict):
        raise ExperimentConfigError("experiment config failed: top level must be a JSON object.")
    if "kind" not in raw:
        raise ExperimentConfigError("experiment config failed: missing required field 'kind'.")

    known = {f.name for f in fields(ExperimentConfig)} - {"extra"}
    values: dict[str, Any] = {"kind": raw["kind"]}
    for key, value in raw.items():
        if key == "kind" or key not in known:
            continue
        if value is None:
            values[key] = None
        elif key in _INT_FIELDS:
            values[key] = _as_int(value, key)
        elif key in _FLOAT_FIELDS:
            values[key] = _as_float(value, key)
        elif key == "dims":
            items = _as_list(value, key)
            values[key] = tuple(_as_int(v, key) for v in items)
        elif key == "r_grid":
            values[key] = tuple(_as_int(v, key) for v in _as_list(value, key))
        else:
            values[key] = tuple(_as_float(v, key) for v in _as_list(value, key))
    extra = {key: value for key, value in raw.items() if key not in known}
    return ExperimentConfig(**values, extra=extra)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a JSON experiment config."""
    source = Path(path)
    try:
        raw = json.loads(source.read_text())
    except json.JSONDecodeError as e:
        raise ExperimentConfigError(f"experiment config failed: {source} is not valid JSON ({e}).") from e
    return config_from_dict(raw)


__all__ = [
    "EXPERIMENT_KINDS",
    "SYMMETRIC_KINDS",
    "CONVERGENCE_KINDS",
    "SNR_KINDS",
    "DEFAULT_P_GRID",
    "DEFAULT_R_GRID",
    "DEFAULT_SNR_GRID",
    "ExperimentConfig",
    "config_from_dict",
    "load_config",
]
