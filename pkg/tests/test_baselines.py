"""
Tests for LMMSE Baselines Module

Unit tests for the Kalman, nearest-neighbor and PDA reference trackers.
"""

import math

import numpy as np
import pytest

from lmmse_core import (
    ClutterParams,
    KfState,
    Scan,
    Window,
    WindowError,
    innovation_variance,
    kf_predict,
    kf_step,
    nn_step,
    pda_association,
    pda_step,
)

WIDE = Window(0.0, 50.0)


@pytest.fixture
def unit_state():
    """Scalar random-walk state x_hat = 0, P = 1."""
    return KfState(x_hat=np.zeros(1), p=np.eye(1))


def _scan(values, window=WIDE):
    return Scan(values=np.asarray(values, dtype=float), truth_index=None, window=window)


class TestKalmanFilter:
    """Tests for kf_predict and kf_step."""

    def test_scalar_update(self, unit_state):
        """P^- = 1, S = 2, K = 0.5."""
        after = kf_step(unit_state, 4.0, 1.0, 0.0, 1.0, 1.0)
        assert after.x_hat[0] == pytest.approx(2.0)
        assert after.p[0, 0] == pytest.approx(0.5)

    def test_steady_state_without_noise(self, unit_state):
        """a = 1, c = 0, g = 1 drives P toward zero."""
        state = unit_state
        for _ in range(1000):
            state = kf_step(state, 0.0, 1.0, 0.0, 1.0, 1.0)
        assert state.p[0, 0] == pytest.approx(1.0 / 1001.0)

    def test_zero_observation(self):
        """H = 0 leaves the prediction unchanged."""
        a = np.array([[1.0, 0.2], [0.0, 0.95]])
        c = np.array([[0.25], [0.5]])
        state = KfState(x_hat=np.array([1.0, 2.0]), p=np.eye(2))
        after = kf_step(state, 10.0, a, c, np.zeros((1, 2)), 1.0)
        pred = kf_predict(state, a, c)
        np.testing.assert_allclose(after.x_hat, pred.x_hat)
        np.testing.assert_allclose(after.p, pred.p)

    def test_predict_only(self, unit_state):
        """y = None returns the prediction."""
        after = kf_step(unit_state, None, 0.5, 1.0, 1.0, 1.0)
        assert after.p[0, 0] == pytest.approx(1.25)

    def test_innovation_variance(self):
        """S = H P H^T + G G^T."""
        s = innovation_variance(np.diag([2.0, 3.0]), np.array([[1.0, 1.0]]), 2.0)
        assert s[0, 0] == pytest.approx(9.0)

    def test_singular_innovation(self, unit_state):
        """A zero innovation variance cannot be inverted."""
        state = KfState(x_hat=np.zeros(1), p=np.zeros((1, 1)))
        with pytest.raises(WindowError) as exc:
            kf_step(state, 1.0, 1.0, 0.0, 1.0, 0.0)
        assert "not positive" in str(exc.value)


class TestNearestNeighbor:
    """Tests for nn_step."""

    def test_picks_nearest(self, unit_state):
        """The value nearest the predicted measurement is used."""
        after = nn_step(unit_state, _scan([-1.0, 0.2, 5.0]), 1.0, 0.0, 1.0, 1.0)
        expected = kf_step(unit_state, 0.2, 1.0, 0.0, 1.0, 1.0)
        np.testing.assert_allclose(after.x_hat, expected.x_hat)
        np.testing.assert_allclose(after.p, expected.p)

    def test_tie_goes_to_lowest_index(self, unit_state):
        """Equidistant values resolve to the first one."""
        after = nn_step(unit_state, _scan([-1.0, 1.0]), 1.0, 0.0, 1.0, 1.0)
        assert after.x_hat[0] == pytest.approx(-0.5)

    def test_empty_scan(self, unit_state):
        """No measurement gives the prediction."""
        after = nn_step(unit_state, _scan([]), 1.0, 1.0, 1.0, 1.0)
        assert after.x_hat[0] == 0.0
        assert after.p[0, 0] == pytest.approx(2.0)

    def test_single_measurement_is_kalman(self):
        """One gated value is a plain Kalman update."""
        a = np.array([[1.0, 0.2], [0.0, 0.95]])
        c = np.array([[0.25], [0.5]])
        h = np.array([[1.0, 0.0]])
        g = math.sqrt(30.0)
        state = KfState(x_hat=np.array([1.0, 0.5]), p=30.0 * np.eye(2))
        after = nn_step(state, _scan([3.0]), a, c, h, g)
        expected = kf_step(state, 3.0, a, c, h, g)
        np.testing.assert_allclose(after.x_hat, expected.x_hat)


class TestPda:
    """Tests for pda_association and pda_step."""

    def test_probabilities_sum_to_one(self):
        """sum beta_i + beta_0 = 1."""
        beta, beta0 = pda_association(np.array([0.0, 1.0, -2.5]), 2.0, ClutterParams(rho=1.0))
        assert float(np.sum(beta)) + beta0 == pytest.approx(1.0)
        assert beta0 > 0

    def test_likelihood_ratio(self):
        """beta_i is proportional to the Gaussian likelihood of nu_i."""
        beta, _ = pda_association(np.array([0.0, 1.0]), 1.0, ClutterParams(rho=1.0))
        assert beta[0] / beta[1] == pytest.approx(math.exp(0.5))

    def test_clutter_weight_against_normal_density(self):
        """beta_0 compares lambda (1 - P_D P_G) / P_D with the normal density at nu."""
        params = ClutterParams(rho=1.0, p_d=0.9, p_g=0.99)
        s = 4.0
        density = math.exp(-0.5 * 1.5**2 / s) / math.sqrt(2.0 * math.pi * s)
        b = params.clutter_rate * (1.0 - 0.9 * 0.99) / 0.9
        beta, beta0 = pda_association(np.array([1.5]), s, params)
        assert beta0 == pytest.approx(b / (b + density))
        assert beta[0] == pytest.approx(density / (b + density))

    def test_no_clutter_certain_detection_is_kalman(self, unit_state):
        """rho = 0 and P_D = 1 give beta = 1 and the Kalman update."""
        params = ClutterParams(rho=0.0, p_d=1.0)
        step = pda_step(unit_state, _scan([1.5]), 1.0, 0.0, 1.0, 1.0, params)
        expected = kf_step(unit_state, 1.5, 1.0, 0.0, 1.0, 1.0)
        assert step.beta0 == 0.0
        np.testing.assert_allclose(step.beta, [1.0])
        np.testing.assert_allclose(step.state.x_hat, expected.x_hat)
        np.testing.assert_allclose(step.state.p, expected.p)

    def test_symmetric_measurements(self, unit_state):
        """Values symmetric about the prediction keep the estimate and inflate P."""
        params = ClutterParams(rho=0.5)
        step = pda_step(unit_state, _scan([-1.0, 1.0]), 1.0, 0.0, 1.0, 1.0, params)
        corrected = kf_step(unit_state, 0.0, 1.0, 0.0, 1.0, 1.0)
        assert step.state.x_hat[0] == pytest.approx(0.0, abs=1e-12)
        assert step.state.p[0, 0] > corrected.p[0, 0]
        np.testing.assert_allclose(step.state.p, step.state.p.T)

    def test_empty_scan(self, unit_state):
        """No measurement gives the prediction with beta_0 = 1."""
        step = pda_step(unit_state, _scan([]), 1.0, 1.0, 1.0, 1.0, ClutterParams(rho=1.0))
        assert step.beta0 == 1.0
        assert step.beta.size == 0
        assert step.state.p[0, 0] == pytest.approx(2.0)
