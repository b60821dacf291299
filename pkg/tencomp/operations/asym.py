"""
Asymmetric tensor completion: model, regularized loss, gradients, descent and metrics.

The estimate is T = Σ_i u_i ⊗ v_i ⊗ w_i. Because (c u, v / c, w) gives the same
tensor, the loss carries a balancing penalty that keeps ‖u_i‖, ‖v_i‖ and ‖w_i‖
close to each other.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from .._types import FactorMatrix, IndexArray, Vector
from . import _random
from ._base import tracked
from ._sparse import cp_values, factor_rows_gradient
from ._validation import (
    DimensionMismatchError,
    DivergenceError,
    as_float_array,
    validate_factor_matrix,
    validate_noise_level,
    validate_probability,
)
from .metrics import DEFAULT_SUCCESS_THRESHOLD, assignment_to_perm, dense_tensor_errors
from .observations import AsymObservationSet
from .tensor import cp_compose_asym

logger = logging.getLogger(__name__)

DEFAULT_ASYM_ETA = 1.0

ASYM_TRACE_COLUMNS = [
    "t",
    "loss",
    "rel_u_f",
    "rel_v_f",
    "rel_w_f",
    "rel_u_2inf",
    "rel_v_2inf",
    "rel_w_2inf",
    "rel_tensor_f",
    "rel_tensor_2inf",
    "rel_tensor_inf",
]


@dataclass(frozen=True)
class AsymFactors:
    """Factor matrices U (d1 x r), V (d2 x r), W (d3 x r) with a common rank."""

    U: FactorMatrix
    V: FactorMatrix
    W: FactorMatrix

    def __post_init__(self) -> None:
        U = validate_factor_matrix(self.U, "AsymFactors", "U")
        V = validate_factor_matrix(self.V, "AsymFactors", "V")
        W = validate_factor_matrix(self.W, "AsymFactors", "W")
        if not U.shape[1] == V.shape[1] == W.shape[1]:
            raise DimensionMismatchError(
                f"AsymFactors failed: column counts differ ({U.shape[1]}, {V.shape[1]}, {W.shape[1]})."
            )
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "W", W)

    @property
    def rank(self) -> int:
        return int(self.U.shape[1])

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.U.shape[0], self.V.shape[0], self.W.shape[0])

    @property
    def magnitudes(self) -> Vector:
        """λ_i = ‖u_i‖‖v_i‖‖w_i‖."""
        return (
            np.linalg.norm(self.U, axis=0)
            * np.linalg.norm(self.V, axis=0)
            * np.linalg.norm(self.W, axis=0)
        )

    def matrices(self) -> tuple[FactorMatrix, FactorMatrix, FactorMatrix]:
        return self.U, self.V, self.W

    def to_tensor(self) -> np.ndarray:
        return cp_compose_asym(self.U, self.V, self.W)


@dataclass(frozen=True)
class RegParams:
    """Per-column weights of the balancing penalty (non-negative)."""

    alpha: Vector

    def __post_init__(self) -> None:
        alpha = as_float_array(self.alpha, 1, "alpha", "RegParams")
        if np.any(alpha < 0):
            raise ValueError("RegParams failed: alpha must be non-negative.")
        object.__setattr__(self, "alpha", alpha)


def _alpha(alpha: RegParams | Any, r: int, operation: str) -> Vector:
    weights = alpha.alpha if isinstance(alpha, RegParams) else RegParams(np.asarray(alpha, float)).alpha
    if weights.shape != (r,):
        raise DimensionMismatchError(
            f"{operation} failed: alpha has shape {weights.shape}, expected ({r},)."
        )
    return weights


def _check_obs(obs: AsymObservationSet, F: AsymFactors, operation: str) -> None:
    if obs.dims != F.dims:
        raise DimensionMismatchError(
            f"{operation} failed: factors have dims {F.dims} but observations have {obs.dims}."
        )


def gen_asym_factors(d1: int, d2: int, d3: int, r: int, seed: int) -> AsymFactors:
    """
    Balanced Gaussian ground truth.

    Draws Gaussian û, v̂, ŵ, sets λ_i = ‖û_i‖‖v̂_i‖‖ŵ_i‖ and returns the unit
    directions each scaled by λ_i^{1/3}, so ‖u_i‖ = ‖v_i‖ = ‖w_i‖.
    """
    if min(d1, d2, d3, r) < 1:
        raise ValueError(f"gen_asym_factors failed: dims and r must be positive, got {(d1, d2, d3, r)}.")
    rng = _random.stream(seed, _random.ASYM_FACTORS)
    raw = [rng.standard_normal((d, r)) for d in (d1, d2, d3)]
    norms = [np.linalg.norm(M, axis=0) for M in raw]
    scale = np.cbrt(norms[0] * norms[1] * norms[2])
    U, V, W = (M / n * scale for M, n in zip(raw, norms))
    return AsymFactors(U=U, V=V, W=W)


def sample_asym_observations(
    F: AsymFactors,
    p: float,
    sigma: float,
    seed: int,
) -> AsymObservationSet:
    """Observe every cell of the d1 x d2 x d3 tensor independently with probability p."""
    validate_probability(p, "sample_asym_observations")
    validate_noise_level(sigma, "sample_asym_observations")
    d1, d2, d3 = F.dims
    keep = _random.stream(seed, _random.MASK).random(d1 * d2 * d3) < p
    flat = np.flatnonzero(keep)
    idx = np.stack(np.unravel_index(flat, (d1, d2, d3)), axis=1).astype(np.int64)
    values = cp_values(idx, F.U, F.V, F.W)
    if sigma > 0:
        values = values + sigma * _random.stream(seed, _random.NOISE).standard_normal(idx.shape[0])
    return AsymObservationSet(dims=(d1, d2, d3), p=p, sigma=sigma, seed=seed, indices=idx, values=values)


def asym_snr_to_sigma(F: AsymFactors, snr: float) -> float:
    """σ with SNR = ‖T*‖_F² / (σ² d1 d2 d3); SNR = inf gives 0."""
    if not snr > 0:
        raise ValueError(f"asym_snr_to_sigma failed: SNR must be positive, got {snr}.")
    if np.isinf(snr):
        return 0.0
    T = F.to_tensor()
    return float(np.sqrt(np.sum(T * T) / T.size / snr))


def _sq_norms(F: AsymFactors) -> tuple[Vector, Vector, Vector]:
    return (
        np.sum(F.U * F.U, axis=0),
        np.sum(F.V * F.V, axis=0),
        np.sum(F.W * F.W, axis=0),
    )


def reg(F: AsymFactors, alpha: RegParams | Any) -> float:
    """(1/24) Σ_i α_i [(‖u_i‖²−‖v_i‖²)² + (‖u_i‖²−‖w_i‖²)² + (‖v_i‖²−‖w_i‖²)²]."""
    weights = _alpha(alpha, F.rank, "reg")
    a, b, c = _sq_norms(F)
    return float(np.sum(weights * ((a - b) ** 2 + (a - c) ** 2 + (b - c) ** 2)) / 24.0)


def reg_gradient(F: AsymFactors, alpha: RegParams | Any) -> tuple[FactorMatrix, FactorMatrix, FactorMatrix]:
    """Gradient of reg; the u_i block is (α_i/6)(2‖u_i‖² − ‖v_i‖² − ‖w_i‖²) u_i."""
    weights = _alpha(alpha, F.rank, "reg_gradient")
    a, b, c = _sq_norms(F)
    return (
        F.U * (weights * (2 * a - b - c) / 6.0),
        F.V * (weights * (2 * b - a - c) / 6.0),
        F.W * (weights * (2 * c - a - b) / 6.0),
    )


def _residual(obs: AsymObservationSet, F: AsymFactors) -> Vector:
    return cp_values(obs.indices, F.U, F.V, F.W) - obs.values


def loss_asym(obs: AsymObservationSet, F: AsymFactors, alpha: RegParams | Any) -> float:
    """(1/6p) Σ_Ω (Σ_i u_i⊗v_i⊗w_i − T)² + reg(F, alpha)."""
    _check_obs(obs, F, "loss_asym")
    res = _residual(obs, F)
    return float(np.dot(res, res)) / (6.0 * obs.p) + reg(F, alpha)


def _grad_from_residual(
    obs: AsymObservationSet,
    F: AsymFactors,
    res: Vector,
    alpha: Vector,
) -> tuple[FactorMatrix, FactorMatrix, FactorMatrix]:
    d1, d2, d3 = obs.dims
    scale = 1.0 / (3.0 * obs.p)
    rU, rV, rW = reg_gradient(F, alpha)
    return (
        scale * factor_rows_gradient(obs.indices, res, 0, F.V, F.W, d1) + rU,
        scale * factor_rows_gradient(obs.indices, res, 1, F.U, F.W, d2) + rV,
        scale * factor_rows_gradient(obs.indices, res, 2, F.U, F.V, d3) + rW,
    )


def grad_asym(
    obs: AsymObservationSet,
    F: AsymFactors,
    alpha: RegParams | Any,
) -> tuple[FactorMatrix, FactorMatrix, FactorMatrix]:
    """
    (∇_U, ∇_V, ∇_W) of loss_asym.

    The data part of ∇_{u_i} is (1/3p) P_Ω(Σ u⊗v⊗w − T) ×2 v_i ×3 w_i, summed over
    observed cells; V and W are analogous.
    """
    _check_obs(obs, F, "grad_asym")
    weights = _alpha(alpha, F.rank, "grad_asym")
    return _grad_from_residual(obs, F, _residual(obs, F), weights)


def default_alpha(F0: AsymFactors) -> RegParams:
    """α_i = λ̂_i^{2/3} with λ̂_i = ‖u_i⁰‖‖v_i⁰‖‖w_i⁰‖."""
    return RegParams(np.cbrt(F0.magnitudes) ** 2)


def normalized_asym_stepsize(F0: AsymFactors, eta: float = DEFAULT_ASYM_ETA) -> float:
    """
    eta / max_i λ̂_i^{4/3}.

    With α_i = λ_i^{2/3}, the loss curves like λ_i^{4/3} along the scale and
    balance directions of component i and like λ_i^{4/3}/3 across its factors.
    Any eta < 2 keeps the largest component contracting; the default eta = 1
    settles it along those directions in one step.
    """
    top = float(np.max(np.cbrt(F0.magnitudes) ** 4))
    if top == 0.0:
        raise ValueError("normalized_asym_stepsize failed: all factor columns are zero.")
    return eta / top


def default_asym_stepsize(F0: AsymFactors) -> float:
    return normalized_asym_stepsize(F0, DEFAULT_ASYM_ETA)


@dataclass(frozen=True)
class MatrixMatch:
    """Sign- and permutation-matched error of one factor matrix.

    ``perm[i]`` is the estimate column paired with truth column i and
    ``signs[i]`` the sign applied to it.
    """

    rel_f: float
    rel_2inf: float
    perm: IndexArray
    signs: Vector


@dataclass(frozen=True)
class AsymFactorErrors:
    u: MatrixMatch
    v: MatrixMatch
    w: MatrixMatch

    @property
    def max_rel_f(self) -> float:
        return max(self.u.rel_f, self.v.rel_f, self.w.rel_f)


def match_signed(F: FactorMatrix, Fstar: FactorMatrix) -> MatrixMatch:
    """
    min over permutations Π and column signs S of ‖FΠS − F*‖_F / ‖F*‖_F.

    Solved exactly as an assignment on c(a, b) = min(‖f_a − f*_b‖², ‖f_a + f*_b‖²).
    """
    F = validate_factor_matrix(F, "asym_factor_errors", "F")
    Fstar = validate_factor_matrix(Fstar, "asym_factor_errors", "Fstar")
    if F.shape != Fstar.shape:
        raise DimensionMismatchError(
            f"asym_factor_errors failed: shape {F.shape} does not match shape {Fstar.shape}."
        )
    minus = F[:, :, None] - Fstar[:, None, :]
    plus = F[:, :, None] + Fstar[:, None, :]
    cost_minus = np.sum(minus * minus, axis=0)
    cost_plus = np.sum(plus * plus, axis=0)
    perm = assignment_to_perm(np.minimum(cost_minus, cost_plus))
    cols = np.arange(Fstar.shape[1])
    signs = np.where(cost_minus[perm, cols] <= cost_plus[perm, cols], 1.0, -1.0)
    D = F[:, perm] * signs - Fstar
    return MatrixMatch(
        rel_f=float(np.linalg.norm(D)) / float(np.linalg.norm(Fstar)),
        rel_2inf=float(np.max(np.linalg.norm(D, axis=1))) / float(np.max(np.linalg.norm(Fstar, axis=1))),
        perm=perm,
        signs=signs,
    )


def asym_factor_errors(F: AsymFactors, Fstar: AsymFactors) -> AsymFactorErrors:
    """Per-matrix relative errors, each matrix matched independently."""
    return AsymFactorErrors(
        u=match_signed(F.U, Fstar.U),
        v=match_signed(F.V, Fstar.V),
        w=match_signed(F.W, Fstar.W),
    )


def asym_tensor_errors(F: AsymFactors, Fstar: AsymFactors) -> dict[str, float]:
    """Relative tensor errors in F, 2,∞ (largest mode-1 slice) and ∞ norms."""
    return dense_tensor_errors(F.to_tensor(), Fstar.to_tensor())


def asym_metrics_record(
    F: AsymFactors,
    Fstar: AsymFactors,
    threshold: float = DEFAULT_SUCCESS_THRESHOLD,
) -> dict[str, Any]:
    """metrics.json content for an asymmetric estimate; success uses the worst matrix."""
    errs = asym_factor_errors(F, Fstar)
    record: dict[str, Any] = {
        "rel_u_f": errs.u.rel_f,
        "rel_v_f": errs.v.rel_f,
        "rel_w_f": errs.w.rel_f,
        "rel_u_2inf": errs.u.rel_2inf,
        "rel_v_2inf": errs.v.rel_2inf,
        "rel_w_2inf": errs.w.rel_2inf,
    }
    record.update(asym_tensor_errors(F, Fstar))
    record["success"] = bool(errs.max_rel_f <= threshold)
    return record


@dataclass
class AsymGdTrace:
    """Per-iteration rows keyed by ASYM_TRACE_COLUMNS plus the final factors."""

    rows: list[dict[str, float | None]] = field(default_factory=list)
    final: AsymFactors | None = None
    eta: float = 0.0
    alpha: Vector | None = None

    @property
    def final_loss(self) -> float:
        value = self.rows[-1]["loss"]
        assert value is not None
        return float(value)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=ASYM_TRACE_COLUMNS).astype(
            {col: "float64" for col in ASYM_TRACE_COLUMNS[1:]}
        )


def _trace_row(
    t: int,
    value: float,
    F: AsymFactors,
    truth: AsymFactors | None,
    Tstar: np.ndarray | None,
) -> dict[str, float | None]:
    row: dict[str, float | None] = dict.fromkeys(ASYM_TRACE_COLUMNS)
    row["t"] = t
    row["loss"] = value
    if truth is not None and Tstar is not None:
        errs = asym_factor_errors(F, truth)
        row.update(
            rel_u_f=errs.u.rel_f,
            rel_v_f=errs.v.rel_f,
            rel_w_f=errs.w.rel_f,
            rel_u_2inf=errs.u.rel_2inf,
            rel_v_2inf=errs.v.rel_2inf,
            rel_w_2inf=errs.w.rel_2inf,
        )
        row.update(dense_tensor_errors(F.to_tensor(), Tstar))
    return row


@tracked("gd_asym", detail=lambda trace: {"iters": len(trace.rows) - 1, "final_loss": trace.final_loss})
def gd_asym(
    obs: AsymObservationSet,
    F0: AsymFactors,
    alpha: RegParams | Any | None = None,
    eta: float | None = None,
    t0: int = 100,
    truth: AsymFactors | None = None,
) -> AsymGdTrace:
    """
    Simultaneous gradient steps on (U, V, W), all gradients taken at the current iterate.

    Args:
        obs: Observed entries.
        F0: Starting factors.
        alpha: Penalty weights; defaults to default_alpha(F0).
        eta: Raw stepsize >= 0; defaults to default_asym_stepsize(F0).
        t0: Number of updates.
        truth: Optional ground truth for per-iteration errors.

    Raises:
        DivergenceError: on a non-finite iterate.
    """
    _check_obs(obs, F0, "gd_asym")
    weights = default_alpha(F0).alpha if alpha is None else _alpha(alpha, F0.rank, "gd_asym")
    step = default_asym_stepsize(F0) if eta is None else eta
    if not step >= 0:
        raise ValueError(f"gd_asym failed: eta must be non-negative, got {step}.")
    if t0 < 0:
        raise ValueError(f"gd_asym failed: t0 must be non-negative, got {t0}.")
    Tstar = None
    if truth is not None:
        if truth.dims != F0.dims or truth.rank != F0.rank:
            raise DimensionMismatchError("gd_asym failed: truth does not match the shape of F0.")
        Tstar = truth.to_tensor()

    U, V, W = (M.copy() for M in F0.matrices())
    trace = AsymGdTrace(eta=step, alpha=weights)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(t0 + 1):
            F = AsymFactors(U=U, V=V, W=W)
            res = _residual(obs, F)
            value = float(np.dot(res, res)) / (6.0 * obs.p) + reg(F, weights)
            trace.rows.append(_trace_row(t, value, F, truth, Tstar))
            if t == t0:
                trace.final = F
                break
            gU, gV, gW = _grad_from_residual(obs, F, res, weights)
            U, V, W = U - step * gU, V - step * gV, W - step * gW
            if not (np.all(np.isfinite(U)) and np.all(np.isfinite(V)) and np.all(np.isfinite(W))):
                raise DivergenceError(
                    f"gd_asym failed: iterate {t + 1} has non-finite entries (eta={step:.3e}).",
                    iteration=t + 1,
                )
    return trace


__all__ = [
    "DEFAULT_ASYM_ETA",
    "ASYM_TRACE_COLUMNS",
    "AsymFactors",
    "RegParams",
    "gen_asym_factors",
    "sample_asym_observations",
    "asym_snr_to_sigma",
    "reg",
    "reg_gradient",
    "loss_asym",
    "grad_asym",
    "default_alpha",
    "normalized_asym_stepsize",
    "default_asym_stepsize",
    "MatrixMatch",
    "AsymFactorErrors",
    "match_signed",
    "asym_factor_errors",
    "asym_tensor_errors",
    "asym_metrics_record",
    "AsymGdTrace",
    "gd_asym",
]
