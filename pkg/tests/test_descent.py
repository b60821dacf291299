"""Tests for the symmetric loss, its gradient and gradient descent."""

import numpy as np
import pytest

from tencomp import DimensionMismatchError, DivergenceError, RunSession
from tencomp.operations.descent import (
    TRACE_COLUMNS,
    gd_run,
    gradient,
    loss,
    normalized_stepsize,
    theorem_stepsize,
)
from tencomp.operations.metrics import factor_errors
from tencomp.operations.sampling import gen_factors, sample_observations
from tencomp.operations.tensor import cp_compose, seq_product


@pytest.fixture
def noiseless_obs(random_factors):
    return sample_observations(random_factors, p=0.5, sigma=0.0, seed=11)


@pytest.fixture
def start(random_factors):
    return random_factors + 0.3 * np.random.default_rng(1).standard_normal(random_factors.shape)


def dense_residual(obs, U):
    return obs.mask() * (cp_compose(U) - obs.to_dense())


class TestLossAndGradient:
    """Tests for loss and gradient against dense oracles."""

    def test_loss_matches_dense_oracle(self, partial_obs, start):
        """loss = Σ over the observed cells of the squared residual / 6p."""
        R = dense_residual(partial_obs, start)
        expected = np.sum(R**2) / (6 * partial_obs.p)
        assert loss(partial_obs, start) == pytest.approx(expected, rel=1e-12)

    def test_gradient_matches_dense_oracle(self, partial_obs, start):
        """gradient = p⁻¹ P_Ω(residual) ×seq U ×seq U."""
        expected = seq_product(dense_residual(partial_obs, start), start, start) / partial_obs.p
        np.testing.assert_allclose(gradient(partial_obs, start), expected, rtol=1e-10, atol=1e-10)

    def test_gradient_finite_differences(self, partial_obs, start):
        """Central differences of loss agree with gradient entry by entry."""
        G = gradient(partial_obs, start)
        h = 1e-6
        numeric = np.zeros_like(start)
        for idx in np.ndindex(*start.shape):
            bump = np.zeros_like(start)
            bump[idx] = h
            numeric[idx] = (loss(partial_obs, start + bump) - loss(partial_obs, start - bump)) / (2 * h)
        np.testing.assert_allclose(numeric, G, rtol=1e-5, atol=1e-5 * np.max(np.abs(G)))

    def test_zero_at_truth(self, noiseless_obs, random_factors):
        """Noiseless data makes the ground truth a zero-loss stationary point."""
        assert loss(noiseless_obs, random_factors) == pytest.approx(0.0, abs=1e-24)
        np.testing.assert_allclose(gradient(noiseless_obs, random_factors), np.zeros((6, 2)), atol=1e-11)

    def test_row_mismatch(self, partial_obs):
        """U with the wrong number of rows should raise."""
        with pytest.raises(DimensionMismatchError, match="rows"):
            loss(partial_obs, np.ones((5, 2)))


class TestStepsizes:
    """Tests for normalized_stepsize and theorem_stepsize."""

    def test_normalized_stepsize(self):
        """eta is divided by half the mean fourth power of the column norms."""
        U0 = np.array([[1.0, 0.0], [0.0, 2.0]])
        assert normalized_stepsize(U0, 0.2) == pytest.approx(0.4 / ((1.0 + 16.0) / 2))

    def test_default_step_keeps_radial_update_contracting(self):
        """At eta = 0.2 the radial factor 1 − 3·step·‖u‖⁴ stays inside (−1, 1) for equal norms."""
        U0 = 3.0 * np.eye(4)
        step = normalized_stepsize(U0, 0.2)
        assert step == pytest.approx(0.4 / 81.0)
        assert abs(1.0 - 3.0 * step * 81.0) < 1.0

    def test_normalized_stepsize_zero_factors(self):
        """All-zero factors have no scale."""
        with pytest.raises(ValueError, match="zero"):
            normalized_stepsize(np.zeros((3, 2)), 0.2)

    def test_theorem_stepsize(self):
        """λmin^{4/3} / (32 λmax^{8/3}) with λ = ‖u‖³."""
        Ustar = np.array([[1.0, 0.0], [0.0, 2.0]])
        assert theorem_stepsize(Ustar) == pytest.approx(1.0 / (32.0 * 2.0**8))


class TestGdRun:
    """Tests for gd_run."""

    def test_truth_is_fixed_point(self, noiseless_obs, random_factors):
        """Starting at the truth on noiseless data, iterates stay put up to roundoff."""
        eta = normalized_stepsize(random_factors, 0.2)
        trace = gd_run(noiseless_obs, random_factors, eta=eta, t0=10, truth=random_factors)
        np.testing.assert_allclose(trace.final, random_factors, rtol=1e-12, atol=1e-12)
        assert all(rec.loss < 1e-24 for rec in trace.records)
        assert trace.records[-1].rel_dist_f < 1e-12

    def test_t0_zero_returns_start(self, partial_obs, start):
        """t0 = 0 records only iterate 0 and returns U0."""
        trace = gd_run(partial_obs, start, eta=0.1, t0=0)
        assert len(trace.records) == 1
        np.testing.assert_array_equal(trace.final, start)
        assert trace.final_loss == pytest.approx(loss(partial_obs, start))

    def test_eta_zero_keeps_start(self, partial_obs, start):
        """A zero stepsize leaves every iterate equal to U0."""
        trace = gd_run(partial_obs, start, eta=0.0, t0=5)
        np.testing.assert_array_equal(trace.final, start)
        assert len({rec.loss for rec in trace.records}) == 1

    def test_does_not_mutate_start(self, partial_obs, start):
        """U0 is copied before the first update."""
        before = start.copy()
        gd_run(partial_obs, start, eta=normalized_stepsize(start, 0.05), t0=3)
        np.testing.assert_array_equal(start, before)

    def test_small_steps_reduce_loss(self, noiseless_obs, start):
        """A small stepsize lowers the loss from a perturbed start."""
        trace = gd_run(noiseless_obs, start, eta=normalized_stepsize(start, 0.01), t0=20)
        assert trace.final_loss < trace.records[0].loss

    @pytest.mark.parametrize("seed", [2, 3, 4])
    def test_rank_one_loss_strictly_decreases(self, seed):
        """Rank one, p=1, from 0.9·u* with η = 0.2/‖u*‖⁴: the loss falls at every step above roundoff."""
        ustar = gen_factors(5, 1, seed=seed)
        obs = sample_observations(ustar, p=1.0, sigma=0.0, seed=seed)
        eta = 0.2 / float(np.sum(ustar**2)) ** 2
        losses = [rec.loss for rec in gd_run(obs, 0.9 * ustar, eta=eta, t0=50).records]
        floor = 1e-20 * losses[0]
        assert all(after < before for before, after in zip(losses, losses[1:]) if before > floor)
        assert losses[-1] <= floor

    def test_one_step_is_a_gradient_step(self, partial_obs, start):
        """U¹ = U⁰ − η∇f(U⁰)."""
        eta = 1e-3
        trace = gd_run(partial_obs, start, eta=eta, t0=1)
        np.testing.assert_allclose(trace.final, start - eta * gradient(partial_obs, start), rtol=1e-14, atol=1e-14)

    def test_divergence(self, partial_obs, start):
        """A huge stepsize blows up and reports the first bad iterate."""
        with pytest.raises(DivergenceError) as excinfo:
            gd_run(partial_obs, 3.0 * start, eta=1e6, t0=200)
        assert 1 <= excinfo.value.iteration <= 200

    def test_trace_with_truth(self, partial_obs, start, random_factors):
        """Trace rows carry relative factor and tensor errors."""
        trace = gd_run(partial_obs, start, eta=1e-3, t0=2, truth=random_factors)
        first = trace.records[0]
        expected = factor_errors(start, random_factors).dist_f / np.linalg.norm(random_factors)
        assert first.rel_dist_f == pytest.approx(expected)
        frame = trace.to_frame()
        assert list(frame.columns) == TRACE_COLUMNS
        assert frame["t"].tolist() == [0, 1, 2]
        assert frame["rel_tensor_f"].notna().all()

    def test_trace_without_truth(self, partial_obs, start):
        """Without truth only t and loss are filled."""
        frame = gd_run(partial_obs, start, eta=1e-3, t0=2).to_frame()
        assert frame["loss"].notna().all()
        assert frame["rel_dist_f"].isna().all()

    def test_truth_shape_mismatch(self, partial_obs, start):
        """truth must have U0's shape."""
        with pytest.raises(DimensionMismatchError, match="truth"):
            gd_run(partial_obs, start, eta=1e-3, t0=1, truth=np.ones((6, 3)))

    @pytest.mark.parametrize("eta, t0", [(-1.0, 1), (0.1, -1)])
    def test_bad_arguments(self, partial_obs, start, eta, t0):
        """Negative eta or t0 should be rejected."""
        with pytest.raises(ValueError, match="non-negative"):
            gd_run(partial_obs, start, eta=eta, t0=t0)

    def test_recorded_in_session(self, partial_obs, start):
        """gd_run records its iteration count and final loss."""
        with RunSession() as session:
            trace = gd_run(partial_obs, start, eta=1e-3, t0=4)
        stage = session.last_stage
        assert stage.operation == "gd_run"
        assert stage.detail["iters"] == 4
        assert stage.detail["final_loss"] == trace.final_loss
