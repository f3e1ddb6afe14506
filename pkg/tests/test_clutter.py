"""
Tests for LMMSE Clutter Module

Unit tests for validation windows, scan generation and the per-scan mode law.
"""

import math

import numpy as np
import pytest

from lmmse_core import (
    ClutterParams,
    CountModel,
    MissRule,
    Scan,
    ScanDraws,
    Window,
    WindowError,
    assemble_scan,
    averaged_measurement_gain,
    build_mode_distribution,
    generate_scan,
    make_window,
    miss_probability,
    validate,
)
from tests.conftest import SCENARIO_A, SCENARIO_G_NOM

FAR_AWAY = np.array([1.0e6, 0.0])


class TestWindow:
    """Tests for the validation window."""

    def test_gate_multiplier(self):
        """P_G = 0.99 gives g = 2.5758."""
        assert ClutterParams(p_g=0.99).gate == pytest.approx(2.5758293, rel=1e-6)

    def test_width_and_clutter_std(self):
        """Halfwidth 2 gives d = 4 and g_cl^2 = 16/12."""
        window = Window(center=0.0, halfwidth=2.0)
        assert window.d == 4.0
        assert window.g_cl**2 == pytest.approx(16.0 / 12.0)

    def test_make_window(self):
        """Center H A x_prev, halfwidth g sqrt(S)."""
        params = ClutterParams()
        window = make_window(np.array([2.0, 1.0]), SCENARIO_A, params, 4.0)
        assert window.center == pytest.approx(2.2)
        assert window.halfwidth == pytest.approx(2.0 * params.gate)

    def test_make_window_zero_origin(self):
        """A zero estimate centers the window at zero."""
        window = make_window(np.zeros(2), SCENARIO_A, ClutterParams(), 1.0)
        assert window.center == 0.0

    @pytest.mark.parametrize("s", [0.0, -1.0])
    def test_non_positive_variance(self, s):
        """S <= 0 has no window."""
        with pytest.raises(WindowError) as exc:
            make_window(np.zeros(2), SCENARIO_A, ClutterParams(), s)
        assert "S=" in str(exc.value)

    def test_contains_is_inclusive(self):
        """Window edges belong to the window."""
        window = Window(1.0, 2.0)
        assert window.contains(-1.0)
        assert window.contains(3.0)
        assert not window.contains(3.0001)


class TestScan:
    """Tests for the Scan container."""

    def test_value_outside_window(self):
        """Values outside the window are rejected."""
        with pytest.raises(WindowError) as exc:
            Scan(values=np.array([0.0, 5.0]), truth_index=None, window=Window(0.0, 1.0))
        assert "outside window" in str(exc.value)

    def test_truth_index_out_of_range(self):
        """truth_index must point into the scan."""
        with pytest.raises(WindowError):
            Scan(values=np.array([0.0]), truth_index=1, window=Window(0.0, 1.0))

    def test_empty_scan(self):
        """An empty scan is valid."""
        scan = Scan(values=np.zeros(0), truth_index=None, window=Window(0.0, 1.0))
        assert scan.n == 0


class TestGenerateScan:
    """Tests for scan generation."""

    def test_no_clutter_certain_detection(self):
        """rho = 0, P_D = 1 and the truth in the window gives exactly the truth."""
        params = ClutterParams(rho=0.0, p_d=1.0)
        rng = np.random.default_rng(1)
        for _ in range(50):
            scan = generate_scan(np.zeros(2), Window(0.0, 1000.0), params, rng)
            assert scan.n == 1
            assert scan.truth_index == 0
            assert scan.values[0] == scan.true_value
            assert scan.in_gate

    def test_missed_detection(self):
        """A detection draw above P_D drops the truth."""
        params = ClutterParams(rho=0.0, p_d=0.95)
        draws = ScanDraws(true_noise=0.0, detect_u=0.99, count_u=0.5, clutter_key=3)
        scan = assemble_scan(np.zeros(2), Window(0.0, 10.0), params, draws)
        assert scan.n == 0
        assert scan.truth_index is None
        assert not scan.detected
        assert scan.true_value == 0.0

    def test_truth_outside_window(self):
        """A detected measurement outside the window is not kept."""
        params = ClutterParams(rho=0.0, p_d=1.0)
        draws = ScanDraws(true_noise=0.0, detect_u=0.1, count_u=0.5, clutter_key=3)
        scan = assemble_scan(FAR_AWAY, Window(0.0, 10.0), params, draws)
        assert scan.detected
        assert not scan.in_gate
        assert scan.n == 0

    def test_poisson_mean(self):
        """Mean clutter count is lambda d."""
        params = ClutterParams(rho=2.0)
        window = Window(0.0, 5.0)
        expected = 2.0 * window.d / SCENARIO_G_NOM
        rng = np.random.default_rng(77)
        scans = 20000
        counts = np.array(
            [generate_scan(FAR_AWAY, window, params, rng).n for _ in range(scans)]
        )
        assert abs(counts.mean() - expected) < 4.0 * math.sqrt(expected / scans)

    def test_fixed_count(self):
        """The fixed count model always places round(lambda d) points."""
        params = ClutterParams(rho=2.0, count_model=CountModel.FIXED)
        window = Window(0.0, 5.0)
        rng = np.random.default_rng(4)
        counts = {generate_scan(FAR_AWAY, window, params, rng).n for _ in range(20)}
        assert counts == {round(2.0 * window.d / SCENARIO_G_NOM)}

    def test_values_inside_window(self):
        """Clutter is uniform over the window."""
        params = ClutterParams(rho=3.0)
        window = Window(10.0, 4.0)
        rng = np.random.default_rng(8)
        values = np.concatenate(
            [generate_scan(FAR_AWAY, window, params, rng).values for _ in range(500)]
        )
        assert values.min() >= window.lower
        assert values.max() <= window.upper
        assert abs(values.mean() - window.center) < 0.25

    def test_common_random_numbers(self):
        """The same draws against two windows share the target's measurement."""
        params = ClutterParams(rho=1.0)
        draws = ScanDraws.sample(np.random.default_rng(5))
        x_true = np.array([0.5, 0.0])
        first = assemble_scan(x_true, Window(0.0, 20.0), params, draws)
        second = assemble_scan(x_true, Window(1.0, 25.0), params, draws)
        assert first.true_value == second.true_value
        assert first.detected == second.detected


class TestMissProbability:
    """Tests for the all-clutter atom weight."""

    def test_default_rule(self):
        """(1 - P_D)(1 - P_G)."""
        params = ClutterParams(p_d=0.95, p_g=0.99)
        assert miss_probability(params) == pytest.approx(5e-4)

    def test_standard_rule(self):
        """1 - P_D P_G."""
        params = ClutterParams(p_d=0.95, p_g=0.99)
        assert miss_probability(params, MissRule.STANDARD) == pytest.approx(0.0595)

    def test_certain_detection(self):
        """P_D = 1 makes the default rule weight zero."""
        assert miss_probability(ClutterParams(p_d=1.0)) == 0.0


class TestModeDistribution:
    """Tests for build_mode_distribution."""

    @pytest.fixture
    def window(self):
        return Window(0.0, 6.0)

    def test_single_detection(self, window):
        """N = 1 without misses is the nominal sensor."""
        params = ClutterParams()
        dist = build_mode_distribution(1, window, params, SCENARIO_A)
        assert len(dist.atoms) == 1
        mode = dist.realizations[0]
        np.testing.assert_allclose(mode.h, [[1.0, 0.0]])
        np.testing.assert_allclose(mode.g, [[SCENARIO_G_NOM]])
        np.testing.assert_allclose(mode.f, np.zeros((1, 2)))

    def test_placement_atom(self, window):
        """Atom i has the truth in row i and clutter elsewhere."""
        params = ClutterParams()
        dist = build_mode_distribution(3, window, params, SCENARIO_A)
        np.testing.assert_allclose(dist.weights, [1 / 3] * 3)
        mode = dist.realizations[1]
        ha = params.h_row @ SCENARIO_A
        np.testing.assert_allclose(mode.h[1], params.h_row[0])
        np.testing.assert_allclose(mode.h[[0, 2]], np.zeros((2, 2)))
        np.testing.assert_allclose(np.diag(mode.g), [window.g_cl, SCENARIO_G_NOM, window.g_cl])
        np.testing.assert_allclose(mode.f[[0, 2]], np.vstack([ha, ha]))
        np.testing.assert_allclose(mode.f[1], [0.0, 0.0])

    def test_miss_atom_weights(self, window):
        """N = 2 with the default miss weight 5e-4."""
        params = ClutterParams(p_d=0.95, p_g=0.99)
        dist = build_mode_distribution(2, window, params, SCENARIO_A, include_miss=True)
        np.testing.assert_allclose(dist.weights, [0.49975, 0.49975, 0.0005])
        miss = dist.realizations[2]
        np.testing.assert_allclose(miss.h, np.zeros((2, 2)))
        np.testing.assert_allclose(miss.g, window.g_cl * np.eye(2))
        assert validate(dist).valid

    def test_no_miss_atom_when_weight_zero(self, window):
        """P_D = 1 adds no all-clutter atom."""
        params = ClutterParams(p_d=1.0)
        dist = build_mode_distribution(2, window, params, SCENARIO_A, include_miss=True)
        assert len(dist.atoms) == 2

    def test_process_noise_carried(self, window):
        """Every atom carries the given C."""
        c = np.array([[0.25], [0.5]])
        dist = build_mode_distribution(2, window, ClutterParams(), SCENARIO_A, c=c)
        for mode in dist.realizations:
            np.testing.assert_allclose(mode.c, c)

    def test_zero_detections(self, window):
        """N = 0 has no mode law."""
        with pytest.raises(WindowError):
            build_mode_distribution(0, window, ClutterParams(), SCENARIO_A)


class TestAveragedGain:
    """Tests for averaged_measurement_gain."""

    def test_common_block(self):
        """[Psi Psi Psi] returns Psi."""
        k_gain = np.array([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]])
        np.testing.assert_allclose(averaged_measurement_gain(k_gain, 3), [[1.0], [2.0]])
