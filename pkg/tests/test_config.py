"""
Tests for LMMSE Config Module

Unit tests for flat YAML loading, flag overrides and validation.
"""

from pathlib import Path

import pytest

from lmmse_core import (
    ConfigurationError,
    CountModel,
    FilterName,
    MissRule,
    OutputFormat,
    parse_config,
    serialize_config,
)
from lmmse_core.exceptions import ProbabilityRangeError, UnknownFilterError

DATA_DIR = Path(__file__).parent.parent / "data"


class TestDefaults:
    """Tests for the built-in defaults."""

    def test_benchmark_scenario_defaults(self):
        """No file and no flags gives the benchmark scenario."""
        config = parse_config()
        experiment = config.experiment
        assert experiment.horizon == 400
        assert experiment.runs == 1000
        assert experiment.densities == [0.2, 0.5, 1.0, 2.0]
        assert experiment.clutter.p_d == 0.95
        assert experiment.clutter.p_g == 0.99
        assert experiment.clutter.g_nom == pytest.approx(30.0**0.5)
        assert experiment.filters == [FilterName.LMMSE, FilterName.NN, FilterName.PDA]
        assert experiment.miss_rule == MissRule.PAPER
        assert config.format == OutputFormat.CSV
        assert config.out is None

    def test_bundled_yaml_matches_defaults(self):
        """data/benchmark_scenario.yaml resolves to the defaults."""
        from_file = parse_config(DATA_DIR / "benchmark_scenario.yaml")
        defaults = parse_config()
        assert from_file.experiment.system == defaults.experiment.system
        assert from_file.experiment.densities == defaults.experiment.densities
        assert from_file.experiment.clutter.g_nom == pytest.approx(
            defaults.experiment.clutter.g_nom
        )


class TestOverrides:
    """Tests for flag overrides."""

    def test_rho_list(self):
        """--rho 0.5,1,2 parses to three densities."""
        config = parse_config(overrides={"rho": "0.5,1,2"})
        assert config.experiment.densities == [0.5, 1.0, 2.0]

    def test_none_ignored(self):
        """Overrides with None keep the file value."""
        config = parse_config(overrides={"runs": None, "horizon": 25})
        assert config.experiment.runs == 1000
        assert config.experiment.horizon == 25

    def test_override_beats_file(self, tmp_path):
        """Flags take precedence over the file."""
        path = tmp_path / "c.yaml"
        path.write_text("runs: 7\nhorizon: 30\n")
        config = parse_config(path, {"runs": 3})
        assert config.experiment.runs == 3
        assert config.experiment.horizon == 30

    def test_filters_case_insensitive(self):
        """Filter names are normalized."""
        config = parse_config(overrides={"filters": "PDA, lmmse"})
        assert config.experiment.filters == [FilterName.PDA, FilterName.LMMSE]

    def test_choices(self):
        """Enum keys accept their values."""
        config = parse_config(
            overrides={"miss_weight": "standard", "count_model": "fixed", "format": "json"}
        )
        assert config.experiment.miss_rule == MissRule.STANDARD
        assert config.experiment.clutter.count_model == CountModel.FIXED
        assert config.format == OutputFormat.JSON

    def test_miss_weight_paper_and_alias(self):
        """miss_weight accepts paper, and product resolves to the same rule."""
        paper = parse_config(overrides={"miss_weight": "paper"})
        alias = parse_config(overrides={"miss_weight": "Product"})
        assert paper.experiment.miss_rule == MissRule.PAPER
        assert alias.experiment.miss_rule == MissRule.PAPER
        assert "miss_weight: paper" in serialize_config(alias)


class TestValidation:
    """Tests for rejected configurations."""

    def test_pd_out_of_range(self):
        """pd = 1.7 is rejected naming the key."""
        with pytest.raises(ProbabilityRangeError) as exc:
            parse_config(overrides={"pd": 1.7})
        assert "pd out of range" in str(exc.value)
        assert exc.value.key == "pd"

    @pytest.mark.parametrize("value", [0.0, 1.0])
    def test_pg_open_interval(self, value):
        """pg must lie strictly between 0 and 1."""
        with pytest.raises(ProbabilityRangeError) as exc:
            parse_config(overrides={"pg": value})
        assert "pg out of range" in str(exc.value)

    def test_pd_one_allowed(self):
        """pd = 1 is a valid certain detection."""
        assert parse_config(overrides={"pd": 1.0}).experiment.clutter.p_d == 1.0

    def test_negative_rho(self):
        """Densities must be non-negative."""
        with pytest.raises(ConfigurationError) as exc:
            parse_config(overrides={"rho": "0.5,-1"})
        assert "rho out of range" in str(exc.value)

    def test_unknown_filter(self):
        """Unknown filter names name the key 'filters'."""
        with pytest.raises(UnknownFilterError) as exc:
            parse_config(overrides={"filters": "lmmse,imm"})
        assert "'imm'" in str(exc.value)
        assert "filters" in str(exc.value)

    def test_unknown_key(self, tmp_path):
        """Unknown keys in the file are rejected."""
        path = tmp_path / "c.yaml"
        path.write_text("horizon: 10\nclutter_density: 2\n")
        with pytest.raises(ConfigurationError) as exc:
            parse_config(path)
        assert exc.value.key == "clutter_density"

    def test_invalid_type(self):
        """Pydantic errors are reported with the flat key."""
        with pytest.raises(ConfigurationError) as exc:
            parse_config(overrides={"runs": 0})
        assert exc.value.key == "runs"

    def test_dimension_mismatch(self, tmp_path):
        """h_nom must match the state dimension."""
        path = tmp_path / "c.yaml"
        path.write_text("h_nom: [1.0, 0.0, 0.0]\n")
        with pytest.raises(ConfigurationError) as exc:
            parse_config(path)
        assert "h_nom" in str(exc.value)

    def test_missing_file(self, tmp_path):
        """A missing file is reported."""
        with pytest.raises(ConfigurationError) as exc:
            parse_config(tmp_path / "nope.yaml")
        assert "not found" in str(exc.value)

    def test_invalid_yaml(self, tmp_path):
        """Malformed YAML is reported."""
        path = tmp_path / "bad.yaml"
        path.write_text("horizon: [1, 2\n")
        with pytest.raises(ConfigurationError) as exc:
            parse_config(path)
        assert "Invalid YAML" in str(exc.value)

    def test_not_a_mapping(self, tmp_path):
        """A YAML list is not a configuration."""
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError) as exc:
            parse_config(path)
        assert "key: value mapping" in str(exc.value)

    def test_empty_file(self, tmp_path):
        """An empty file gives the defaults."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert parse_config(path).experiment.horizon == 400


class TestSerialize:
    """Tests for serialize_config."""

    def test_round_trip(self, tmp_path):
        """parse -> serialize -> parse is the identity."""
        original = parse_config(
            overrides={"rho": "0.5,2", "runs": 12, "pd": 0.9, "filters": "nn,pda", "out": "r.csv"}
        )
        path = tmp_path / "round.yaml"
        path.write_text(serialize_config(original))
        assert parse_config(path) == original

    def test_flat_keys(self):
        """Serialized text uses the flat key names."""
        text = serialize_config(parse_config())
        for key in ("horizon:", "rho:", "pd:", "pg:", "miss_weight:", "filters:"):
            assert key in text
