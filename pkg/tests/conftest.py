"""Shared pytest configuration."""

import math

import numpy as np
import pytest

from cpa_photonics.circuits.clements import mzi_matrix
from cpa_photonics.circuits.lossybs import solve_custom


def pytest_sessionstart(session):
    """Abort early if the MZI convention drifted (theta=pi bar, theta=0 cross)."""
    bar = np.abs(mzi_matrix(math.pi, 0.0))
    cross = np.abs(mzi_matrix(0.0, 0.0))
    bar_ok = np.allclose(bar, np.eye(2), atol=1e-12)
    cross_ok = np.allclose(cross, np.fliplr(np.eye(2)), atol=1e-12)
    if not (bar_ok and cross_ok):
        pytest.exit("MZI convention self-test failed", returncode=1)


@pytest.fixture
def phis():
    """Standard 201-point grid on [0, 2pi]."""
    return np.linspace(0.0, 2.0 * math.pi, 201)


@pytest.fixture
def random_device():
    """Factory for random valid minus-branch devices drawn from an rng."""

    def make(rng):
        alpha = rng.uniform(0.0, 0.5)
        lower = alpha / (1.0 - alpha)
        beta = 0.5 * math.asin(rng.uniform(lower, 1.0))
        t_mag = math.sqrt(1.0 - alpha) * math.cos(beta)
        return solve_custom(alpha, t_mag, upper=bool(rng.integers(2)))

    return make
