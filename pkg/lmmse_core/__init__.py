"""
LMMSE Core - Modal LMMSE Filtering Library

This module provides the recursive LMMSE filter for white-mode jump linear
systems with estimate-feedback terms, its tracking-in-clutter instantiation,
KF/NN/PDA baselines and the Monte-Carlo benchmark.
"""

from .baselines import (
    KfState,
    PdaStep,
    innovation_variance,
    kf_predict,
    kf_step,
    nn_step,
    pda_association,
    pda_step,
)
from .bench import (
    GateEvent,
    LmmseTracker,
    NearestNeighborTracker,
    PdaTracker,
    RunRecord,
    TrackLossMonitor,
    detect_track_loss,
    resolve_workers,
    run_experiment,
    simulate_run,
    trace_run,
)
from .clutter import (
    Scan,
    ScanDraws,
    Window,
    assemble_scan,
    averaged_measurement_gain,
    build_mode_distribution,
    generate_scan,
    make_window,
    miss_probability,
)
from .config import parse_config, serialize_config
from .exceptions import (
    ConfigurationError,
    CovarianceError,
    DimensionMismatchError,
    LmmseError,
    ModeDistributionError,
    OutputError,
    ProbabilityRangeError,
    RunIndexError,
    UnknownFilterError,
    WindowError,
)
from .expectations import (
    DynamicsExpectations,
    MeasurementExpectations,
    StepExpectations,
    clutter_expectations,
    dynamics_expectations,
    measurement_expectations,
    xi_matrix,
)
from .lmmse_filter import (
    FilterState,
    GainSet,
    LmmseFilter,
    MomentStep,
    feedback_variant,
    fold_feedback,
    run_filter,
)
from .models import (
    AggregateResult,
    ClutterParams,
    CliConfig,
    CountModel,
    DensityResult,
    ExperimentConfig,
    FilterName,
    FilterSummary,
    MissRule,
    OutputFormat,
    TrackingSystem,
    ValidationResult,
)
from .report import render_summary, write_results, write_trace
from .system import (
    DeterministicInput,
    FeedbackEstimate,
    ModeDistribution,
    ModeRealization,
    NoiseDraw,
    SystemSpec,
    Trajectory,
    measure,
    sample_noise,
    simulate,
    step_state,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    # Version
    "__version__",
    # System model
    "ModeRealization",
    "ModeDistribution",
    "DeterministicInput",
    "FeedbackEstimate",
    "SystemSpec",
    "NoiseDraw",
    "Trajectory",
    "validate",
    "step_state",
    "measure",
    "sample_noise",
    "simulate",
    # Expectations
    "DynamicsExpectations",
    "MeasurementExpectations",
    "StepExpectations",
    "dynamics_expectations",
    "measurement_expectations",
    "clutter_expectations",
    "xi_matrix",
    # Filter
    "FilterState",
    "GainSet",
    "MomentStep",
    "LmmseFilter",
    "feedback_variant",
    "fold_feedback",
    "run_filter",
    # Clutter
    "Window",
    "Scan",
    "ScanDraws",
    "make_window",
    "generate_scan",
    "assemble_scan",
    "build_mode_distribution",
    "miss_probability",
    "averaged_measurement_gain",
    # Baselines
    "KfState",
    "PdaStep",
    "kf_predict",
    "innovation_variance",
    "kf_step",
    "nn_step",
    "pda_step",
    "pda_association",
    # Bench
    "GateEvent",
    "RunRecord",
    "TrackLossMonitor",
    "LmmseTracker",
    "NearestNeighborTracker",
    "PdaTracker",
    "detect_track_loss",
    "simulate_run",
    "trace_run",
    "run_experiment",
    "resolve_workers",
    # Config and reports
    "parse_config",
    "serialize_config",
    "write_results",
    "write_trace",
    "render_summary",
    # Models
    "AggregateResult",
    "ClutterParams",
    "CliConfig",
    "CountModel",
    "DensityResult",
    "ExperimentConfig",
    "FilterName",
    "FilterSummary",
    "MissRule",
    "OutputFormat",
    "TrackingSystem",
    "ValidationResult",
    # Exceptions
    "LmmseError",
    "ConfigurationError",
    "ProbabilityRangeError",
    "UnknownFilterError",
    "DimensionMismatchError",
    "ModeDistributionError",
    "CovarianceError",
    "WindowError",
    "RunIndexError",
    "OutputError",
]
