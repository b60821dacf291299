"""Shared test fixtures."""

import numpy as np
import pytest
from scipy.linalg import hadamard

from tencomp.config import reset_config
from tencomp.operations.asym import AsymFactors, gen_asym_factors, sample_asym_observations
from tencomp.operations.sampling import gen_factors, sample_observations


@pytest.fixture
def orthogonal_factors():
    """8 x 3 factors with orthogonal ±scale columns (Hadamard columns).

    Every entry of a column has the same magnitude, so the diagonal of the Gram
    matrix is a constant shift and noiseless recovery is exact.
    """
    H = hadamard(8).astype(float)
    return H[:, 1:4] * np.array([1.0, 1.15, 1.3])


@pytest.fixture
def full_obs(orthogonal_factors):
    """Every entry of cp_compose(orthogonal_factors), noiseless."""
    return sample_observations(orthogonal_factors, p=1.0, sigma=0.0, seed=0)


@pytest.fixture
def random_factors():
    """Small Gaussian factors, d=6, r=2."""
    return gen_factors(6, 2, seed=11)


@pytest.fixture
def partial_obs(random_factors):
    """Half of the canonical entries of a d=6 instance, with a little noise."""
    return sample_observations(random_factors, p=0.5, sigma=0.1, seed=11)


@pytest.fixture
def orthogonal_asym_factors():
    """Balanced asymmetric factors with orthonormal-direction columns.

    U uses Hadamard columns; V and W come from QR of Gaussian matrices. Each
    column triple is scaled so ‖u_i‖ = ‖v_i‖ = ‖w_i‖.
    """
    rng = np.random.default_rng(5)
    U = hadamard(8).astype(float)[:, 1:3] / np.sqrt(8)
    V, _ = np.linalg.qr(rng.standard_normal((6, 2)))
    W, _ = np.linalg.qr(rng.standard_normal((7, 2)))
    scale = np.array([2.0, 1.5])
    return AsymFactors(U=U * scale, V=V * scale, W=W * scale)


@pytest.fixture
def asym_factors():
    """Gaussian balanced asymmetric factors, dims (5, 6, 7), r=2."""
    return gen_asym_factors(5, 6, 7, 2, seed=3)


@pytest.fixture
def asym_obs(asym_factors):
    """About 60% of the cells of asym_factors' tensor, noiseless."""
    return sample_asym_observations(asym_factors, p=0.6, sigma=0.0, seed=3)


@pytest.fixture(autouse=True)
def reset_config_fixture():
    """Reset config before each test."""
    reset_config()
    yield
    reset_config()
