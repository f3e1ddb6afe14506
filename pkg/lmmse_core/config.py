"""
LMMSE Configuration

Flat YAML configuration files and command-line overrides, resolved into a
validated CliConfig.
"""

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml
from pydantic import ValidationError

from .exceptions import ConfigurationError, ProbabilityRangeError, UnknownFilterError
from .models import (
    ClutterParams,
    CliConfig,
    CountModel,
    ExperimentConfig,
    FilterName,
    MissRule,
    OutputFormat,
    TrackingSystem,
)

# flat key -> (section, field)
FLAT_KEYS: Dict[str, tuple] = {
    "horizon": ("experiment", "horizon"),
    "runs": ("experiment", "runs"),
    "rho": ("experiment", "densities"),
    "seed": ("experiment", "seed"),
    "filters": ("experiment", "filters"),
    "misses": ("experiment", "misses"),
    "miss_weight": ("experiment", "miss_rule"),
    "workers": ("experiment", "workers"),
    "a": ("system", "a"),
    "c": ("system", "c"),
    "x0_mean": ("system", "x0_mean"),
    "p0": ("system", "p0"),
    "h_nom": ("clutter", "h_nom"),
    "g_nom": ("clutter", "g_nom"),
    "pd": ("clutter", "p_d"),
    "pg": ("clutter", "p_g"),
    "count_model": ("clutter", "count_model"),
    "out": ("cli", "out"),
    "format": ("cli", "format"),
    "verbosity": ("cli", "verbosity"),
    "trace": ("cli", "trace"),
}

LIST_KEYS = {"rho", "filters", "h_nom", "x0_mean"}

# older spelling of miss_weight: paper
MISS_WEIGHT_ALIASES = {"product": MissRule.PAPER.value}


def _split_list(key: str, value: Any) -> List[Any]:
    if isinstance(value, str):
        items: List[Any] = [item.strip() for item in value.split(",") if item.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [value]
    if key in ("rho", "h_nom", "x0_mean"):
        try:
            return [float(item) for item in items]
        except (TypeError, ValueError):
            raise ConfigurationError(
                f"Invalid number list for key '{key}': {value}",
                suggestions=[f"Use a comma-separated list, e.g. {key}: 0.5,1,2"],
                key=key,
            )
    return [str(item).strip().lower() for item in items]


def _check_probability(key: str, value: Any, upper_inclusive: bool) -> float:
    try:
        prob = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"Invalid number for key '{key}': {value}", key=key)
    upper_ok = prob <= 1.0 if upper_inclusive else prob < 1.0
    if not (prob > 0.0 and upper_ok):
        bounds = f"0 < {key} <= 1" if upper_inclusive else f"0 < {key} < 1"
        raise ProbabilityRangeError(key, prob, bounds)
    return prob


def _check_choice(key: str, value: Any, choices: List[str]) -> str:
    text = str(value).strip().lower()
    if text not in choices:
        raise ConfigurationError(
            f"Invalid value for key '{key}': {value}",
            suggestions=[f"Choose one of: {', '.join(choices)}"],
            key=key,
        )
    return text


def _normalize(flat: Mapping[str, Any]) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for key, value in flat.items():
        if key not in FLAT_KEYS:
            raise ConfigurationError(
                f"Unknown configuration key '{key}'",
                suggestions=[f"Valid keys: {', '.join(FLAT_KEYS)}"],
                key=key,
            )
        if value is None:
            continue
        if key in LIST_KEYS:
            value = _split_list(key, value)
        if key == "pd":
            value = _check_probability(key, value, upper_inclusive=True)
        elif key == "pg":
            value = _check_probability(key, value, upper_inclusive=False)
        elif key == "rho":
            if not value:
                raise ConfigurationError("Key 'rho' needs at least one density", key=key)
            for rho in value:
                if rho < 0:
                    raise ConfigurationError(
                        f"rho out of range: {rho} (expected rho >= 0)", key=key
                    )
        elif key == "filters":
            available = [name.value for name in FilterName]
            for name in value:
                if name not in available:
                    raise UnknownFilterError(name, available)
        elif key == "format":
            value = _check_choice(key, value, [fmt.value for fmt in OutputFormat])
        elif key == "miss_weight":
            text = str(value).strip().lower()
            value = _check_choice(
                key,
                MISS_WEIGHT_ALIASES.get(text, text),
                [rule.value for rule in MissRule],
            )
        elif key == "count_model":
            value = _check_choice(key, value, [model.value for model in CountModel])
        values[key] = value
    return values


def _error_key(error: ValidationError) -> Optional[str]:
    reverse = {(section, name): key for key, (section, name) in FLAT_KEYS.items()}
    for detail in error.errors():
        for part in detail.get("loc", ()):
            for section in ("experiment", "system", "clutter", "cli"):
                if (section, part) in reverse:
                    return reverse[(section, part)]
    return None


def build_config(flat: Mapping[str, Any]) -> CliConfig:
    """
    Resolve a flat key/value mapping into a CliConfig.

    Raises:
        ConfigurationError: If a key or value is invalid
    """
    values = _normalize(flat)
    sections: Dict[str, Dict[str, Any]] = {
        "experiment": {},
        "system": {},
        "clutter": {},
        "cli": {},
    }
    for key, value in values.items():
        section, name = FLAT_KEYS[key]
        sections[section][name] = value

    try:
        experiment = ExperimentConfig(
            system=TrackingSystem(**sections["system"]),
            clutter=ClutterParams(**sections["clutter"]),
            **sections["experiment"],
        )
        return CliConfig(experiment=experiment, **sections["cli"])
    except ValidationError as e:
        key = _error_key(e)
        where = f" (key '{key}')" if key else ""
        raise ConfigurationError(
            f"Invalid configuration{where}: {e}",
            suggestions=["Check field types and value ranges"],
            key=key,
        )


def load_flat_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a flat YAML configuration file.

    Raises:
        ConfigurationError: If the file is missing, unreadable or not a mapping
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(
            f"Configuration file not found: {path}",
            suggestions=["Check the --config path", "See data/benchmark_scenario.yaml"],
        )
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(
            f"Invalid YAML format in {path}: {e}",
            suggestions=["Check YAML syntax", "Validate file encoding is UTF-8"],
        )
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(
            f"Configuration file {path} must contain a key: value mapping",
            suggestions=["Write one 'key: value' pair per line"],
        )
    return data


def parse_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> CliConfig:
    """
    Resolve configuration from an optional file and flag overrides.

    Missing keys take the benchmark scenario defaults. Overrides with value None
    are ignored.

    Args:
        path: Flat YAML configuration file
        overrides: Flat key/value pairs that take precedence over the file

    Returns:
        CliConfig

    Raises:
        ConfigurationError: If the file or any value is invalid
    """
    flat: Dict[str, Any] = load_flat_yaml(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            flat[key] = value
    return build_config(flat)


def flatten_config(config: CliConfig) -> Dict[str, Any]:
    """Flat key/value form of a CliConfig."""
    experiment = config.experiment
    objects = {
        "experiment": experiment,
        "system": experiment.system,
        "clutter": experiment.clutter,
        "cli": config,
    }
    flat: Dict[str, Any] = {}
    for key, (section, name) in FLAT_KEYS.items():
        value = getattr(objects[section], name)
        if isinstance(value, list):
            value = [item.value if hasattr(item, "value") else item for item in value]
        elif hasattr(value, "value"):
            value = value.value
        if value is not None:
            flat[key] = value
    return flat


def serialize_config(config: CliConfig) -> str:
    """Flat YAML text that parse_config() reads back to the same config."""
    return yaml.safe_dump(flatten_config(config), sort_keys=False, default_flow_style=None)
