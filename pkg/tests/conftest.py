"""
Shared fixtures for the modal-lmmse test suite.
"""

import math

import numpy as np
import pytest

from lmmse_core import ClutterParams, ExperimentConfig, ModeDistribution, ModeRealization

SCENARIO_A = np.array([[1.0, 0.2], [0.0, 0.95]])
SCENARIO_C = np.array([[0.25], [0.5]])
SCENARIO_H = np.array([[1.0, 0.0]])
SCENARIO_G_NOM = math.sqrt(30.0)


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Random symmetric PSD matrix with entries of order scale."""
    w = rng.standard_normal((n, n))
    return scale * (w @ w.T) / n


def random_stable(rng: np.random.Generator, n: int, radius: float = 0.9) -> np.ndarray:
    """Random matrix with spectral radius equal to radius."""
    a = rng.standard_normal((n, n))
    return radius * a / max(abs(np.linalg.eigvals(a)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scenario_params():
    """Sensor parameters of the benchmark scenario."""
    return ClutterParams()


@pytest.fixture
def scenario_dynamics():
    """Deterministic dynamics-side mode of the benchmark scenario."""
    return ModeDistribution.deterministic(ModeRealization.create(SCENARIO_A, c=SCENARIO_C))


@pytest.fixture
def small_experiment():
    """Benchmark scenario shrunk to unit-test size."""
    return ExperimentConfig(horizon=40, runs=3, densities=[0.5, 2.0], workers=1)


@pytest.fixture
def clean_experiment():
    """No clutter and certain detection: every filter reduces to a gated KF."""
    return ExperimentConfig(
        horizon=60,
        runs=2,
        densities=[0.0],
        clutter=ClutterParams(p_d=1.0, p_g=0.99),
        workers=1,
    )
