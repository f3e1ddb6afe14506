"""
LMMSE Core Exceptions

Custom exception classes for the modal LMMSE filtering toolkit.
"""

from typing import List, Optional, Sequence, Tuple


class LmmseError(Exception):
    """Base exception for all modal-lmmse errors."""

    def __init__(self, message: str, suggestions: Optional[List[str]] = None):
        super().__init__(message)
        self.message = message
        self.suggestions = suggestions or []

    def __str__(self) -> str:
        result = self.message
        if self.suggestions:
            result += "\n\nSuggestions:\n"
            for suggestion in self.suggestions:
                result += f"  - {suggestion}\n"
        return result


class ConfigurationError(LmmseError):
    """Raised when a configuration file or value is invalid."""

    def __init__(
        self,
        message: str,
        suggestions: Optional[List[str]] = None,
        key: Optional[str] = None,
    ):
        self.key = key
        super().__init__(message, suggestions)


class ProbabilityRangeError(ConfigurationError):
    """Raised when a probability-valued setting lies outside its range."""

    def __init__(self, key: str, value: float, bounds: str):
        self.value = value
        self.bounds = bounds
        message = f"{key} out of range: {value} (expected {bounds})"
        super().__init__(
            message,
            suggestions=[f"Set '{key}' to a value satisfying {bounds}"],
            key=key,
        )


class UnknownFilterError(ConfigurationError):
    """Raised when a filter name is not one of the benchmarked algorithms."""

    def __init__(self, name: str, available: Sequence[str]):
        self.name = name
        self.available = list(available)
        message = f"unknown filter '{name}' in key 'filters'"
        super().__init__(
            message,
            suggestions=[f"Available filters: {', '.join(self.available)}"],
            key="filters",
        )


class DimensionMismatchError(LmmseError):
    """Raised when matrix or vector shapes are inconsistent."""

    def __init__(self, what: str, expected: Tuple[int, ...], actual: Tuple[int, ...]):
        self.what = what
        self.expected = expected
        self.actual = actual
        message = f"Dimension mismatch for {what}: expected {expected}, got {actual}"
        super().__init__(message)


class ModeDistributionError(LmmseError):
    """Raised when a mode distribution violates its invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        message = "Invalid mode distribution: " + "; ".join(self.violations)
        super().__init__(
            message,
            suggestions=[
                "Check that the atom weights sum to 1",
                "Check that all atoms share the same state and measurement dimensions",
            ],
        )


class CovarianceError(LmmseError):
    """Raised when the estimation-error moment loses positive semi-definiteness."""

    def __init__(self, step: int, min_eigenvalue: float):
        self.step = step
        self.min_eigenvalue = min_eigenvalue
        message = (
            f"Error moment Sigma - Lambda is not PSD at step {step} "
            f"(min eigenvalue {min_eigenvalue:.3e})"
        )
        super().__init__(
            message,
            suggestions=[
                "Check that the mode distribution matches the simulated system",
                "Check P0 is a symmetric PSD covariance",
            ],
        )


class WindowError(LmmseError):
    """Raised when a validation window or scan is inconsistent."""

    pass


class RunIndexError(LmmseError):
    """Raised when a trace is requested for a run that does not exist."""

    def __init__(self, index: int, runs: int):
        self.index = index
        self.runs = runs
        message = f"Run index {index} out of range for {runs} runs"
        super().__init__(
            message,
            suggestions=[f"Choose a run index between 0 and {runs - 1}"],
        )


class OutputError(LmmseError):
    """Raised when a result or trace file cannot be written."""

    def __init__(self, path: str, reason: str):
        self.path = path
        message = f"Cannot write output file {path}: {reason}"
        super().__init__(
            message,
            suggestions=[
                "Check that the parent directory exists and is writable",
                "Choose another path with --out",
            ],
        )
