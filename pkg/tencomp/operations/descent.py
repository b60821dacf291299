"""Squared loss over the observed mask and constant-stepsize gradient descent."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .._types import FactorMatrix, Vector
from ._base import tracked
from ._sparse import cp_values, factor_rows_gradient
from ._validation import DimensionMismatchError, DivergenceError, validate_factor_matrix
from .metrics import dense_tensor_errors, factor_errors, two_inf
from .observations import ObservationSet
from .tensor import cp_compose

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["t", "loss", "rel_dist_f", "rel_dist_2inf", "rel_tensor_f", "rel_tensor_inf"]


@dataclass(frozen=True)
class TraceRecord:
    t: int
    loss: float
    rel_dist_f: float | None = None
    rel_dist_2inf: float | None = None
    rel_tensor_f: float | None = None
    rel_tensor_inf: float | None = None


@dataclass
class GdTrace:
    """Per-iteration records (iterate 0 included) and the final iterate."""

    records: list[TraceRecord] = field(default_factory=list)
    final: FactorMatrix | None = None
    eta: float = 0.0

    @property
    def final_loss(self) -> float:
        return self.records[-1].loss

    def to_frame(self) -> pd.DataFrame:
        """Trace as a DataFrame; truth-dependent columns are NaN without truth."""
        return pd.DataFrame(
            [
                {
                    "t": rec.t,
                    "loss": rec.loss,
                    "rel_dist_f": rec.rel_dist_f,
                    "rel_dist_2inf": rec.rel_dist_2inf,
                    "rel_tensor_f": rec.rel_tensor_f,
                    "rel_tensor_inf": rec.rel_tensor_inf,
                }
                for rec in self.records
            ],
            columns=TRACE_COLUMNS,
        ).astype({"t": "int64", "rel_dist_f": "float64", "rel_dist_2inf": "float64",
                  "rel_tensor_f": "float64", "rel_tensor_inf": "float64"})


def _check_rows(obs: ObservationSet, U: np.ndarray, operation: str) -> None:
    if U.shape[0] != obs.d:
        raise DimensionMismatchError(
            f"{operation} failed: U has {U.shape[0]} rows but observations have d={obs.d}."
        )


def _residual(obs: ObservationSet, U: FactorMatrix) -> Vector:
    idx = obs.expanded_indices
    return cp_values(idx, U, U, U) - obs.expanded_values


def _loss_from_residual(obs: ObservationSet, residual: Vector) -> float:
    return float(np.dot(residual, residual)) / (6.0 * obs.p)


def _gradient_from_residual(obs: ObservationSet, U: FactorMatrix, residual: Vector) -> FactorMatrix:
    grad = factor_rows_gradient(obs.expanded_indices, residual, 2, U, U, obs.d)
    return grad / obs.p


def loss(obs: ObservationSet, U: FactorMatrix) -> float:
    """
    f(U) = (1/6p) Σ over every observed cell of ([Σ_i u_i⊗3] − T)².

    The sum runs over the expanded symmetric mask, each orbit cell once.
    """
    U = validate_factor_matrix(U, "loss")
    _check_rows(obs, U, "loss")
    return _loss_from_residual(obs, _residual(obs, U))


def gradient(obs: ObservationSet, U: FactorMatrix) -> FactorMatrix:
    """
    ∇f(U) = (1/p) P_Ω(Σ_i u_i⊗3 − T) ×1seq U ×2seq U.

    Each observed cell (j, k, l) with residual ρ adds ρ·U[j, i]·U[k, i] to
    entry (l, i).
    """
    U = validate_factor_matrix(U, "gradient")
    _check_rows(obs, U, "gradient")
    return _gradient_from_residual(obs, U, _residual(obs, U))


def normalized_stepsize(U0: FactorMatrix, eta: float) -> float:
    """
    Scale-free stepsize 2·eta / mean_i ‖u_i⁰‖₂⁴.

    Near a solution f curves like ‖u_i‖⁴ across u_i and like 3‖u_i‖⁴ along it,
    so ‖u_i⁰‖⁴ / 2 is the quadratic coefficient of f in the slow directions.
    The default eta = 0.2 gives 0.4 / mean_i ‖u_i⁰‖⁴, which keeps the radial
    update contracting for every column with ‖u_i⁰‖⁴ below 5/3 of the mean.
    """
    U0 = validate_factor_matrix(U0, "normalized_stepsize", "U0")
    curvature = float(np.mean(np.sum(U0 * U0, axis=0) ** 2)) / 2.0
    if curvature == 0.0:
        raise ValueError("normalized_stepsize failed: all columns of U0 are zero.")
    return eta / curvature


def theorem_stepsize(Ustar: FactorMatrix) -> float:
    """λ*min^{4/3} / (32 λ*max^{8/3}) with λ*_i = ‖u*_i‖₂³."""
    Ustar = validate_factor_matrix(Ustar, "theorem_stepsize", "Ustar")
    sq = np.sum(Ustar * Ustar, axis=0)
    return float(sq.min() ** 2 / (32.0 * sq.max() ** 4))


class _TruthReference:
    """Cached ground-truth quantities for per-iteration trace metrics."""

    def __init__(self, Ustar: FactorMatrix):
        self.Ustar = Ustar
        self.Tstar = cp_compose(Ustar)
        self.norm_f = float(np.linalg.norm(Ustar))
        self.norm_2inf = two_inf(Ustar)

    def record(self, t: int, value: float, U: FactorMatrix) -> TraceRecord:
        errs = factor_errors(U, self.Ustar)
        tens = dense_tensor_errors(cp_compose(U), self.Tstar)
        return TraceRecord(
            t=t,
            loss=value,
            rel_dist_f=errs.dist_f / self.norm_f,
            rel_dist_2inf=errs.dist_2inf / self.norm_2inf,
            rel_tensor_f=tens["rel_tensor_f"],
            rel_tensor_inf=tens["rel_tensor_inf"],
        )


def _trace_detail(trace: GdTrace) -> dict[str, object]:
    detail: dict[str, object] = {"iters": len(trace.records) - 1, "final_loss": trace.final_loss}
    if trace.records[-1].rel_tensor_f is not None:
        detail["rel_tensor_f"] = trace.records[-1].rel_tensor_f
    return detail


@tracked("gd_run", detail=_trace_detail)
def gd_run(
    obs: ObservationSet,
    U0: FactorMatrix,
    eta: float,
    t0: int,
    truth: FactorMatrix | None = None,
) -> GdTrace:
    """
    Vanilla gradient descent U ← U − η∇f(U) for exactly t0 steps.

    No projection, regularization or early stopping. When ``truth`` is given the
    trace carries relative factor and tensor errors at every iterate, and the
    stepsize bound from the convergence theory is logged for reference.

    Args:
        obs: Observed entries.
        U0: d x r starting point.
        eta: Raw stepsize, >= 0 (see normalized_stepsize).
        t0: Number of updates, >= 0.
        truth: Optional ground-truth factors for trace metrics.

    Raises:
        DivergenceError: as soon as an iterate has a non-finite entry.
    """
    U = validate_factor_matrix(U0, "gd_run", "U0").copy()
    _check_rows(obs, U, "gd_run")
    if not eta >= 0:
        raise ValueError(f"gd_run failed: eta must be non-negative, got {eta}.")
    if t0 < 0:
        raise ValueError(f"gd_run failed: t0 must be non-negative, got {t0}.")

    reference = None
    if truth is not None:
        truth = validate_factor_matrix(truth, "gd_run", "truth")
        if truth.shape != U.shape:
            raise DimensionMismatchError(
                f"gd_run failed: truth has shape {truth.shape} but U0 has shape {U.shape}."
            )
        reference = _TruthReference(truth)
        logger.info(
            "gd_run: eta=%.3e, theory bound lambda_min^(4/3)/(32 lambda_max^(8/3))=%.3e",
            eta, theorem_stepsize(truth),
        )

    trace = GdTrace(eta=eta)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(t0 + 1):
            residual = _residual(obs, U)
            value = _loss_from_residual(obs, residual)
            trace.records.append(
                reference.record(t, value, U) if reference is not None else TraceRecord(t=t, loss=value)
            )
            if t == t0:
                break
            U = U - eta * _gradient_from_residual(obs, U, residual)
            if not np.all(np.isfinite(U)):
                raise DivergenceError(
                    f"gd_run failed: iterate {t + 1} has non-finite entries (eta={eta:.3e}).",
                    iteration=t + 1,
                )

    trace.final = U
    logger.debug("gd_run finished %d iterations, final loss %.6e", t0, trace.final_loss)
    return trace


__all__ = [
    "TRACE_COLUMNS",
    "TraceRecord",
    "GdTrace",
    "loss",
    "gradient",
    "normalized_stepsize",
    "theorem_stepsize",
    "gd_run",
]
