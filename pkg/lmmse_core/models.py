"""
LMMSE Data Models

Pydantic v2 models for experiment configuration and benchmark results.
"""

import math
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy.stats import norm


class FilterName(str, Enum):
    """Benchmarked tracking algorithms."""

    LMMSE = "lmmse"
    NN = "nn"
    PDA = "pda"


class OutputFormat(str, Enum):
    """Result file formats."""

    CSV = "csv"
    JSON = "json"


class MissRule(str, Enum):
    """Weight formula for the no-true-measurement mode atom."""

    PAPER = "paper"
    STANDARD = "standard"


class CountModel(str, Enum):
    """Clutter count law inside a validation window."""

    POISSON = "poisson"
    FIXED = "fixed"


def _check_square(name: str, rows: List[List[float]]) -> None:
    if not rows or any(len(row) != len(rows) for row in rows):
        raise ValueError(f"{name} must be a non-empty square matrix")


class ClutterParams(BaseModel):
    """Sensor and clutter parameters of the tracking scenario."""

    h_nom: List[float] = Field(
        default_factory=lambda: [1.0, 0.0],
        description="Nominal observation row",
        min_length=1,
    )
    g_nom: float = Field(
        math.sqrt(30.0), description="True-measurement noise std", gt=0.0
    )
    p_d: float = Field(0.95, description="Detection probability", gt=0.0, le=1.0)
    p_g: float = Field(0.99, description="Gate coverage probability", gt=0.0, lt=1.0)
    rho: float = Field(
        0.0, description="Clutter points per measurement-noise std", ge=0.0
    )
    count_model: CountModel = Field(
        CountModel.POISSON, description="Clutter count law"
    )

    @property
    def gate(self) -> float:
        """Gate multiplier g with P(|v| <= g) = P_G for standard normal v."""
        return float(norm.ppf(0.5 * (1.0 + self.p_g)))

    @property
    def clutter_rate(self) -> float:
        """Clutter points per unit measurement length."""
        return self.rho / self.g_nom

    @property
    def h_row(self) -> np.ndarray:
        return np.asarray(self.h_nom, dtype=float).reshape(1, -1)

    def with_density(self, rho: float) -> "ClutterParams":
        """Copy of these parameters at another clutter density."""
        return self.model_copy(update={"rho": float(rho)})


class TrackingSystem(BaseModel):
    """Target motion model and prior."""

    a: List[List[float]] = Field(
        default_factory=lambda: [[1.0, 0.2], [0.0, 0.95]],
        description="State transition matrix",
    )
    c: List[List[float]] = Field(
        default_factory=lambda: [[0.25], [0.5]],
        description="Process-noise shaping matrix",
    )
    x0_mean: List[float] = Field(
        default_factory=lambda: [0.0, 0.0], description="Initial state mean"
    )
    p0: List[List[float]] = Field(
        default_factory=lambda: [[30.0, 0.0], [0.0, 30.0]],
        description="Initial state covariance",
    )

    @field_validator("a", "p0")
    @classmethod
    def validate_square(cls, v: List[List[float]]) -> List[List[float]]:
        _check_square("matrix", v)
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> "TrackingSystem":
        n = len(self.a)
        if len(self.c) != n or any(len(row) != len(self.c[0]) for row in self.c):
            raise ValueError(f"c must have {n} rows of equal length")
        if len(self.x0_mean) != n:
            raise ValueError(f"x0_mean must have length {n}")
        if len(self.p0) != n:
            raise ValueError(f"p0 must be {n}x{n}")
        return self

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def a_matrix(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)

    @property
    def c_matrix(self) -> np.ndarray:
        return np.asarray(self.c, dtype=float)

    @property
    def x0_vector(self) -> np.ndarray:
        return np.asarray(self.x0_mean, dtype=float)

    @property
    def p0_matrix(self) -> np.ndarray:
        return np.asarray(self.p0, dtype=float)


class ExperimentConfig(BaseModel):
    """Monte-Carlo tracking-in-clutter experiment."""

    horizon: int = Field(400, description="Steps per run", ge=1)
    runs: int = Field(1000, description="Monte-Carlo runs per density", ge=1)
    densities: List[float] = Field(
        default_factory=lambda: [0.2, 0.5, 1.0, 2.0],
        description="Clutter densities to sweep",
        min_length=1,
    )
    system: TrackingSystem = Field(default_factory=TrackingSystem)
    clutter: ClutterParams = Field(default_factory=ClutterParams)
    seed: int = Field(0, description="Base random seed", ge=0)
    filters: List[FilterName] = Field(
        default_factory=lambda: [FilterName.LMMSE, FilterName.NN, FilterName.PDA],
        description="Algorithms to benchmark",
        min_length=1,
    )
    misses: bool = Field(
        True, description="Add the no-true-measurement atom to the LMMSE mode law"
    )
    miss_rule: MissRule = Field(MissRule.PAPER, description="Miss atom weight rule")
    workers: Optional[int] = Field(
        None, description="Worker processes (default: CPU count)", ge=1
    )

    @field_validator("densities")
    @classmethod
    def validate_densities(cls, v: List[float]) -> List[float]:
        for rho in v:
            if rho < 0:
                raise ValueError(f"Clutter density must be non-negative: {rho}")
        return v

    @field_validator("filters")
    @classmethod
    def validate_unique_filters(cls, v: List[FilterName]) -> List[FilterName]:
        if len(set(v)) != len(v):
            raise ValueError("filters must not repeat")
        return v

    @model_validator(mode="after")
    def validate_observation(self) -> "ExperimentConfig":
        if len(self.clutter.h_nom) != self.system.n:
            raise ValueError(
                f"h_nom has length {len(self.clutter.h_nom)}, "
                f"state dimension is {self.system.n}"
            )
        return self


class FilterSummary(BaseModel):
    """Aggregated statistics for one filter at one density."""

    filter: FilterName = Field(..., description="Algorithm")
    mean_rmse: float = Field(..., description="Mean position RMSE over runs", ge=0.0)
    rmse_stderr: float = Field(..., description="Standard error of mean RMSE", ge=0.0)
    mean_loss_time: float = Field(..., description="Mean track-loss time")
    loss_time_stderr: float = Field(
        ..., description="Standard error of mean loss time", ge=0.0
    )
    runs: int = Field(..., description="Runs averaged", ge=1)


class DensityResult(BaseModel):
    """Results for every filter at one clutter density."""

    rho: float = Field(..., description="Clutter density")
    filters: List[FilterSummary] = Field(default_factory=list)

    def summary(self, name: FilterName) -> Optional[FilterSummary]:
        """Get the summary for a filter, if it was run."""
        for item in self.filters:
            if item.filter == name:
                return item
        return None


class AggregateResult(BaseModel):
    """Full benchmark result across the density sweep."""

    seed: int = Field(..., description="Base random seed")
    horizon: int = Field(..., description="Steps per run")
    densities: List[DensityResult] = Field(default_factory=list)

    def records(self) -> List[Dict[str, object]]:
        """Flatten into one record per (density, filter)."""
        rows: List[Dict[str, object]] = []
        for density in self.densities:
            for item in density.filters:
                rows.append(
                    {
                        "rho": density.rho,
                        "filter": item.filter.value,
                        "mean_rmse": item.mean_rmse,
                        "mean_loss_time": item.mean_loss_time,
                        "runs": item.runs,
                        "seed": self.seed,
                    }
                )
        return rows


class CliConfig(BaseModel):
    """Resolved command-line configuration."""

    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)
    out: Optional[str] = Field(None, description="Result file path")
    format: OutputFormat = Field(OutputFormat.CSV, description="Result file format")
    verbosity: int = Field(0, description="Logging verbosity", ge=0)
    trace: Optional[int] = Field(None, description="Run index to trace", ge=0)


class ValidationResult(BaseModel):
    """Result of mode distribution validation."""

    valid: bool = Field(..., description="Whether the distribution is valid")
    errors: List[str] = Field(default_factory=list, description="Invariant violations")
    warnings: List[str] = Field(default_factory=list, description="Validation warnings")
