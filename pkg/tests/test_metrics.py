"""Tests for permutation-matched factor errors and tensor errors."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tencomp import DimensionMismatchError
from tencomp.operations.metrics import (
    factor_errors,
    match_permutation,
    metrics_record,
    success,
    tensor_errors,
)


def brute_force_dist(U, Ustar):
    r = Ustar.shape[1]
    return min(np.linalg.norm(U[:, list(perm)] - Ustar) for perm in itertools.permutations(range(r)))


class TestFactorErrors:
    """Tests for match_permutation and factor_errors."""

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10_000))
    def test_matches_exhaustive_search(self, r, seed):
        """The assignment solution equals the minimum over all r! permutations."""
        rng = np.random.default_rng(seed)
        Ustar = rng.standard_normal((5, r))
        U = Ustar[:, rng.permutation(r)] + 0.8 * rng.standard_normal((5, r))
        assert factor_errors(U, Ustar).dist_f == pytest.approx(brute_force_dist(U, Ustar), rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 10_000))
    def test_dist_f_is_symmetric(self, r, seed):
        """Swapping estimate and truth leaves dist_F unchanged."""
        rng = np.random.default_rng(seed)
        U = rng.standard_normal((4, r))
        V = rng.standard_normal((4, r))
        assert factor_errors(U, V).dist_f == pytest.approx(factor_errors(V, U).dist_f, rel=1e-12, abs=1e-14)

    def test_recovers_permutation(self, random_factors):
        """A column-shuffled copy is matched back exactly."""
        U = random_factors[:, [1, 0]]
        perm = match_permutation(U, random_factors)
        np.testing.assert_array_equal(U[:, perm], random_factors)
        assert factor_errors(U, random_factors).dist_f == 0.0

    def test_norms_at_matched_permutation(self):
        """dist_2inf and dist_inf use the dist_F-optimal permutation."""
        Ustar = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        U = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.0]])
        errs = factor_errors(U, Ustar)
        np.testing.assert_array_equal(errs.matched_perm, [1, 0])
        assert errs.dist_f == pytest.approx(0.5)
        assert errs.dist_2inf == pytest.approx(0.5)
        assert errs.dist_inf == pytest.approx(0.5)

    def test_shape_mismatch(self, random_factors):
        """Different shapes should raise DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            factor_errors(random_factors[:, :1], random_factors)


class TestTensorErrorsAndSuccess:
    """Tests for tensor_errors, success and metrics_record."""

    def test_exact_estimate(self, random_factors):
        """An exact (permuted) estimate has zero tensor error."""
        rel_f, rel_inf = tensor_errors(random_factors[:, ::-1], random_factors)
        assert rel_f == pytest.approx(0.0, abs=1e-14)
        assert rel_inf == pytest.approx(0.0, abs=1e-14)

    def test_scaled_estimate(self, random_factors):
        """Scaling U by c scales the tensor by c³."""
        rel_f, rel_inf = tensor_errors(2.0 * random_factors, random_factors)
        assert rel_f == pytest.approx(7.0)
        assert rel_inf == pytest.approx(7.0)

    def test_zero_reference(self):
        """A zero ground truth has no relative error."""
        with pytest.raises(ValueError, match="identically zero"):
            tensor_errors(np.ones((3, 1)), np.zeros((3, 1)))

    def test_success_threshold(self, random_factors):
        """success compares dist_F / ‖U*‖_F against the threshold, inclusive."""
        assert success(random_factors, random_factors)
        assert not success(1.1 * random_factors, random_factors)
        assert success(1.1 * random_factors, random_factors, threshold=0.1 + 1e-12)

    def test_metrics_record(self, random_factors):
        """metrics_record carries every metric and a plain bool flag."""
        record = metrics_record(random_factors, random_factors)
        assert set(record) == {"dist_f", "dist_2inf", "dist_inf", "rel_tensor_f", "rel_tensor_inf", "success"}
        assert record["success"] is True
        assert record["dist_f"] == 0.0
