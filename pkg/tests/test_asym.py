"""Tests for the asymmetric model: penalty, gradients, descent, initialization and metrics."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tencomp import DimensionMismatchError, DivergenceError
from tencomp.operations.asym import (
    ASYM_TRACE_COLUMNS,
    AsymFactors,
    RegParams,
    asym_factor_errors,
    asym_metrics_record,
    asym_snr_to_sigma,
    default_alpha,
    default_asym_stepsize,
    gd_asym,
    gen_asym_factors,
    grad_asym,
    loss_asym,
    match_signed,
    normalized_asym_stepsize,
    reg,
    sample_asym_observations,
)
from tencomp.operations.asym_init import init_asym
from tencomp.operations.tensor import cp_compose_asym


@pytest.fixture
def perturbed(asym_factors):
    rng = np.random.default_rng(2)
    return AsymFactors(
        U=asym_factors.U + 0.2 * rng.standard_normal(asym_factors.U.shape),
        V=asym_factors.V + 0.2 * rng.standard_normal(asym_factors.V.shape),
        W=1.3 * asym_factors.W + 0.2 * rng.standard_normal(asym_factors.W.shape),
    )


def flat(F):
    return np.concatenate([M.ravel() for M in F.matrices()])


def unflat(x, like):
    parts, start = [], 0
    for M in like.matrices():
        parts.append(x[start : start + M.size].reshape(M.shape))
        start += M.size
    return AsymFactors(*parts)


class TestModel:
    """Tests for AsymFactors, instance generation and the penalty."""

    def test_generated_factors_balanced(self, asym_factors):
        """gen_asym_factors gives ‖u_i‖ = ‖v_i‖ = ‖w_i‖ for every column."""
        nu = np.linalg.norm(asym_factors.U, axis=0)
        np.testing.assert_allclose(np.linalg.norm(asym_factors.V, axis=0), nu, rtol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(asym_factors.W, axis=0), nu, rtol=1e-12)
        np.testing.assert_allclose(asym_factors.magnitudes, nu**3, rtol=1e-12)
        assert asym_factors.dims == (5, 6, 7)

    def test_column_count_mismatch(self):
        """Factors must share their column count."""
        with pytest.raises(DimensionMismatchError, match="column counts"):
            AsymFactors(U=np.ones((2, 2)), V=np.ones((3, 1)), W=np.ones((4, 2)))

    def test_sampling_noiseless_values(self, asym_obs, asym_factors):
        """Observed values equal the tensor entries, with no symmetrization."""
        T = cp_compose_asym(asym_factors.U, asym_factors.V, asym_factors.W)
        idx = asym_obs.indices
        np.testing.assert_allclose(asym_obs.values, T[idx[:, 0], idx[:, 1], idx[:, 2]], rtol=1e-12, atol=1e-12)
        assert asym_obs.dims == (5, 6, 7)

    def test_snr(self, asym_factors):
        """SNR = ‖T*‖_F² / (σ² d1 d2 d3)."""
        sigma = asym_snr_to_sigma(asym_factors, 4.0)
        T = asym_factors.to_tensor()
        assert np.sum(T**2) / (sigma**2 * 210) == pytest.approx(4.0)
        assert asym_snr_to_sigma(asym_factors, float("inf")) == 0.0

    def test_reg_zero_when_balanced(self, asym_factors):
        """Balanced factors carry no penalty."""
        assert reg(asym_factors, np.ones(2)) == pytest.approx(0.0, abs=1e-20)

    def test_reg_value(self):
        """A single unbalanced column gives the closed-form penalty."""
        F = AsymFactors(U=np.array([[2.0]]), V=np.array([[1.0]]), W=np.array([[1.0]]))
        # a=4, b=c=1: (3² + 3² + 0) / 24
        assert reg(F, [2.0]) == pytest.approx(2.0 * 18.0 / 24.0)

    @pytest.mark.parametrize("c", [0.5, 2.5, -1.7])
    def test_reg_scales_with_fourth_power(self, perturbed, c):
        """Scaling every factor by c multiplies the penalty by c⁴."""
        alpha = np.array([0.7, 1.3])
        scaled = AsymFactors(U=c * perturbed.U, V=c * perturbed.V, W=c * perturbed.W)
        assert reg(scaled, alpha) == pytest.approx(c**4 * reg(perturbed, alpha), rel=1e-12)

    def test_negative_alpha(self):
        """Penalty weights must be non-negative."""
        with pytest.raises(ValueError, match="non-negative"):
            RegParams(np.array([1.0, -0.5]))

    def test_default_alpha(self, asym_factors):
        """α_i = λ_i^{2/3}."""
        np.testing.assert_allclose(default_alpha(asym_factors).alpha, asym_factors.magnitudes ** (2 / 3), rtol=1e-12)

    def test_normalized_stepsize(self, asym_factors):
        """eta / max λ^{4/3}."""
        expected = 0.5 / np.max(asym_factors.magnitudes ** (4 / 3))
        assert normalized_asym_stepsize(asym_factors, 0.5) == pytest.approx(expected, rel=1e-12)

    def test_default_stepsize_is_unit_eta(self, asym_factors):
        """The default raw step is 1 / max λ^{4/3}."""
        expected = 1.0 / np.max(asym_factors.magnitudes ** (4 / 3))
        assert default_asym_stepsize(asym_factors) == pytest.approx(expected, rel=1e-12)


class TestLossAndGradient:
    """Tests for loss_asym and grad_asym."""

    def test_loss_matches_dense_oracle(self, asym_obs, perturbed):
        """Data term (1/6p)Σ_Ω residual² plus the penalty."""
        R = asym_obs.mask() * (perturbed.to_tensor() - asym_obs.to_dense())
        alpha = np.array([0.7, 1.3])
        expected = np.sum(R**2) / (6 * asym_obs.p) + reg(perturbed, alpha)
        assert loss_asym(asym_obs, perturbed, alpha) == pytest.approx(expected, rel=1e-12)

    def test_gradient_finite_differences(self, asym_obs, perturbed):
        """Central differences of loss_asym match grad_asym in every block."""
        alpha = RegParams(np.array([0.7, 1.3]))
        analytic = flat(AsymFactors(*grad_asym(asym_obs, perturbed, alpha)))
        x0 = flat(perturbed)
        h = 1e-6
        numeric = np.zeros_like(x0)
        for n in range(x0.size):
            bump = np.zeros_like(x0)
            bump[n] = h
            numeric[n] = (
                loss_asym(asym_obs, unflat(x0 + bump, perturbed), alpha)
                - loss_asym(asym_obs, unflat(x0 - bump, perturbed), alpha)
            ) / (2 * h)
        np.testing.assert_allclose(numeric, analytic, rtol=1e-5, atol=1e-5 * np.max(np.abs(analytic)))

    def test_stationary_at_truth(self, asym_obs, asym_factors):
        """Balanced noiseless truth is a zero-loss stationary point for any α."""
        alpha = np.array([3.0, 0.5])
        assert loss_asym(asym_obs, asym_factors, alpha) == pytest.approx(0.0, abs=1e-24)
        for block in grad_asym(asym_obs, asym_factors, alpha):
            np.testing.assert_allclose(block, 0.0, atol=1e-11)

    @pytest.mark.parametrize("flipped", [("U", "V"), ("U", "W"), ("V", "W")])
    def test_loss_invariant_under_paired_sign_flips(self, asym_obs, perturbed, flipped):
        """Negating one column in two of the three factors leaves the loss unchanged."""
        alpha = np.array([0.7, 1.3])
        blocks = {"U": perturbed.U, "V": perturbed.V, "W": perturbed.W}
        for name in flipped:
            blocks[name] = blocks[name] * np.array([-1.0, 1.0])
        flipped_loss = loss_asym(asym_obs, AsymFactors(**blocks), alpha)
        assert flipped_loss == pytest.approx(loss_asym(asym_obs, perturbed, alpha), rel=1e-12)

    def test_alpha_shape(self, asym_obs, asym_factors):
        """alpha must have one weight per column."""
        with pytest.raises(DimensionMismatchError, match="alpha"):
            loss_asym(asym_obs, asym_factors, np.ones(3))

    def test_dims_mismatch(self, asym_obs):
        """Factors must match the observation dims."""
        F = gen_asym_factors(5, 6, 8, 2, seed=0)
        with pytest.raises(DimensionMismatchError, match="dims"):
            loss_asym(asym_obs, F, np.ones(2))


class TestGdAsym:
    """Tests for gd_asym."""

    def test_truth_is_fixed_point(self, asym_obs, asym_factors):
        """Iterates started at the truth stay there."""
        trace = gd_asym(asym_obs, asym_factors, t0=5, truth=asym_factors)
        np.testing.assert_allclose(trace.final.U, asym_factors.U, atol=1e-12)
        assert trace.rows[-1]["rel_tensor_f"] < 1e-12

    def test_simultaneous_update(self, asym_obs, perturbed):
        """One step moves every block by its gradient at the same iterate."""
        alpha = np.array([1.0, 1.0])
        gU, gV, gW = grad_asym(asym_obs, perturbed, alpha)
        trace = gd_asym(asym_obs, perturbed, alpha=alpha, eta=1e-3, t0=1)
        np.testing.assert_allclose(trace.final.U, perturbed.U - 1e-3 * gU, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(trace.final.V, perturbed.V - 1e-3 * gV, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(trace.final.W, perturbed.W - 1e-3 * gW, rtol=1e-14, atol=1e-14)

    def test_defaults_and_loss_decrease(self, asym_obs, perturbed):
        """Default α and stepsize come from F0, and a short run lowers the loss."""
        trace = gd_asym(asym_obs, perturbed, eta=normalized_asym_stepsize(perturbed, 0.05), t0=20)
        np.testing.assert_allclose(trace.alpha, default_alpha(perturbed).alpha)
        assert trace.final_loss < trace.rows[0]["loss"]

    def test_trace_frame(self, asym_obs, perturbed, asym_factors):
        """The trace frame has one row per iterate and the asymmetric columns."""
        frame = gd_asym(asym_obs, perturbed, eta=1e-3, t0=3, truth=asym_factors).to_frame()
        assert list(frame.columns) == ASYM_TRACE_COLUMNS
        assert len(frame) == 4
        assert frame["rel_w_f"].notna().all()

    def test_divergence(self, asym_obs, perturbed):
        """A huge stepsize raises DivergenceError."""
        with pytest.raises(DivergenceError):
            gd_asym(asym_obs, perturbed, eta=1e6, t0=200)


class TestInitAsym:
    """Tests for init_asym."""

    def test_exact_on_orthogonal_factors(self, orthogonal_asym_factors):
        """Fully observed orthogonal factors are recovered up to sign and order."""
        obs = sample_asym_observations(orthogonal_asym_factors, p=1.0, sigma=0.0, seed=0)
        F0, magnitudes = init_asym(obs, 2, L=32, seed=1)
        errs = asym_factor_errors(F0, orthogonal_asym_factors)
        assert errs.max_rel_f < 1e-8
        np.testing.assert_allclose(np.sort(magnitudes), np.sort(orthogonal_asym_factors.magnitudes), rtol=1e-8)

    def test_output_balanced(self, asym_obs):
        """Each initial column triple has equal norms λ^{1/3}."""
        F0, magnitudes = init_asym(asym_obs, 2, L=8, seed=2)
        np.testing.assert_allclose(np.linalg.norm(F0.U, axis=0), np.cbrt(magnitudes), rtol=1e-10)
        np.testing.assert_allclose(np.linalg.norm(F0.V, axis=0), np.cbrt(magnitudes), rtol=1e-10)
        np.testing.assert_allclose(np.linalg.norm(F0.W, axis=0), np.cbrt(magnitudes), rtol=1e-10)

    def test_deterministic(self, asym_obs):
        """Same seed, same initial factors."""
        a, _ = init_asym(asym_obs, 2, L=8, seed=2)
        b, _ = init_asym(asym_obs, 2, L=8, seed=2)
        np.testing.assert_array_equal(a.U, b.U)

    def test_L_below_rank(self, asym_obs):
        """L < r should be rejected."""
        with pytest.raises(ValueError, match="at least r"):
            init_asym(asym_obs, 2, L=1)


class TestAsymMetrics:
    """Tests for match_signed and asym_metrics_record."""

    def test_sign_and_permutation(self, asym_factors):
        """Flipped and shuffled columns match back with zero error."""
        F = asym_factors.U[:, [1, 0]] * np.array([-1.0, 1.0])
        match = match_signed(F, asym_factors.U)
        assert match.rel_f == 0.0
        np.testing.assert_array_equal(match.perm, [1, 0])
        np.testing.assert_array_equal(match.signs, [1.0, -1.0])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 10_000))
    def test_matches_exhaustive_search(self, r, seed):
        """The assignment reaches the minimum over every permutation and sign pattern."""
        rng = np.random.default_rng(seed)
        F = rng.standard_normal((5, r))
        Fstar = rng.standard_normal((5, r))
        best = min(
            np.linalg.norm(F[:, list(perm)] * np.array(signs) - Fstar)
            for perm in itertools.permutations(range(r))
            for signs in itertools.product([1.0, -1.0], repeat=r)
        )
        expected = best / np.linalg.norm(Fstar)
        assert match_signed(F, Fstar).rel_f == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_record(self, asym_factors):
        """An exact estimate succeeds with zero errors."""
        record = asym_metrics_record(asym_factors, asym_factors)
        assert record["success"] is True
        assert record["rel_u_f"] == 0.0
        assert record["rel_tensor_f"] == 0.0
        assert {"rel_tensor_2inf", "rel_tensor_inf", "rel_w_2inf"} <= set(record)
