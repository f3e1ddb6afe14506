"""
LMMSE Clutter Scenario

Validation-window gating, clutter generation, missed detections, scan
assembly and the per-scan mode law of the tracking-in-clutter instantiation.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import poisson

from .exceptions import WindowError
from .models import ClutterParams, CountModel, MissRule
from .system import ModeDistribution, ModeRealization


@dataclass(frozen=True)
class Window:
    """Validation window [center - halfwidth, center + halfwidth]."""

    center: float
    halfwidth: float

    @property
    def d(self) -> float:
        return 2.0 * self.halfwidth

    @property
    def g_cl(self) -> float:
        """Std of a clutter point uniform over the window."""
        return self.d / math.sqrt(12.0)

    @property
    def lower(self) -> float:
        return self.center - self.halfwidth

    @property
    def upper(self) -> float:
        return self.center + self.halfwidth

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class ScanDraws:
    """
    Unit random numbers behind one scan.

    The same draws are replayed against each filter's own window so that the
    filters see common random numbers.
    """

    true_noise: float
    detect_u: float
    count_u: float
    clutter_key: int

    @classmethod
    def sample(cls, rng: np.random.Generator) -> "ScanDraws":
        return cls(
            true_noise=float(rng.standard_normal()),
            detect_u=float(rng.random()),
            count_u=float(rng.random()),
            clutter_key=int(rng.integers(0, 2**63 - 1)),
        )


@dataclass(frozen=True)
class Scan:
    """
    Gated detections of one time step.

    Attributes:
        values: Measurements inside the window, in scan order
        truth_index: Position of the true measurement, if it was kept
        window: Window the scan was gated with
        detected: Whether the sensor detected the target
        true_value: The target's measurement (ground truth, hidden from filters)
    """

    values: np.ndarray
    truth_index: Optional[int]
    window: Window
    detected: bool = True
    true_value: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(-1)
        object.__setattr__(self, "values", values)
        outside = (values < self.window.lower) | (values > self.window.upper)
        if np.any(outside):
            raise WindowError(
                f"{int(np.sum(outside))} scan value(s) outside window "
                f"[{self.window.lower:.6g}, {self.window.upper:.6g}]"
            )
        if self.truth_index is not None and not 0 <= self.truth_index < values.size:
            raise WindowError(
                f"truth_index {self.truth_index} out of range for N={values.size}"
            )

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def in_gate(self) -> bool:
        """Whether the target's measurement falls inside the window."""
        return self.window.contains(self.true_value)


def make_window(
    x_prev: np.ndarray, a: np.ndarray, params: ClutterParams, s: float
) -> Window:
    """
    Window centered on H_nom A x_prev with halfwidth g sqrt(S).

    Args:
        x_prev: Previous estimate
        a: State transition
        params: Sensor parameters
        s: Predicted innovation variance

    Raises:
        WindowError: If S <= 0
    """
    if not s > 0:
        raise WindowError(
            f"Predicted innovation variance must be positive, got S={s}",
            suggestions=["Check G_nom > 0 and the filter moments"],
        )
    center = (params.h_row @ a @ np.asarray(x_prev, dtype=float).reshape(-1)).item()
    return Window(center=center, halfwidth=params.gate * math.sqrt(s))


def clutter_count(window: Window, params: ClutterParams, count_u: float) -> int:
    """Clutter points in the window for the unit draw count_u."""
    mean = params.clutter_rate * window.d
    if params.count_model == CountModel.FIXED:
        return int(round(mean))
    if mean <= 0:
        return 0
    return max(0, int(poisson.ppf(count_u, mean)))


def assemble_scan(
    x_true: np.ndarray, window: Window, params: ClutterParams, draws: ScanDraws
) -> Scan:
    """
    Build a scan from precomputed unit draws.

    The true measurement is kept iff it is detected and falls inside the
    window. Clutter points are uniform over the window and the true value is
    inserted at a uniformly drawn position.
    """
    true_value = (params.h_row @ np.asarray(x_true, dtype=float).reshape(-1)).item()
    true_value += params.g_nom * draws.true_noise
    detected = draws.detect_u < params.p_d
    keep = detected and window.contains(true_value)

    count = clutter_count(window, params, draws.count_u)
    stream = np.random.default_rng(draws.clutter_key)
    values = window.center + (stream.random(count) - 0.5) * window.d

    truth_index = None
    if keep:
        truth_index = int(stream.integers(0, count + 1))
        values = np.insert(values, truth_index, true_value)

    return Scan(
        values=values,
        truth_index=truth_index,
        window=window,
        detected=detected,
        true_value=true_value,
    )


def generate_scan(
    x_true: np.ndarray, window: Window, params: ClutterParams, rng: np.random.Generator
) -> Scan:
    """Draw a scan for the true state x_true."""
    return assemble_scan(x_true, window, params, ScanDraws.sample(rng))


def miss_probability(params: ClutterParams, rule: MissRule = MissRule.PAPER) -> float:
    """Weight of the all-clutter mode atom."""
    if rule == MissRule.STANDARD:
        return 1.0 - params.p_d * params.p_g
    return (1.0 - params.p_d) * (1.0 - params.p_g)


def build_mode_distribution(
    n_detections: int,
    window: Window,
    params: ClutterParams,
    a: np.ndarray,
    include_miss: bool = False,
    miss_rule: MissRule = MissRule.PAPER,
    c: Optional[np.ndarray] = None,
) -> ModeDistribution:
    """
    Mode law of a scan with N detections.

    Atom i places the true measurement in row i: H has H_nom in row i,
    G has G_nom at (i, i) and g_cl on the rest of the diagonal, and F has
    H_nom A in every other row. The optional all-clutter atom
    {0, g_cl I, 1 (x) H_nom A} carries the miss weight; placement atoms share
    the remaining mass equally.

    Raises:
        WindowError: If N < 1
    """
    if n_detections < 1:
        raise WindowError(
            f"Mode law needs at least one detection, got N={n_detections}",
            suggestions=["Use the predict-only path for empty scans"],
        )
    big_n = n_detections
    a = np.atleast_2d(np.asarray(a, dtype=float))
    h = params.h_row
    ha = h @ a
    w0 = miss_probability(params, miss_rule) if include_miss else 0.0

    atoms = []
    for i in range(big_n):
        h_mat = np.zeros((big_n, a.shape[0]))
        h_mat[i] = h
        g_diag = np.full(big_n, window.g_cl)
        g_diag[i] = params.g_nom
        f_mat = np.repeat(ha, big_n, axis=0)
        f_mat[i] = 0.0
        mode = ModeRealization.create(a, c=c, h=h_mat, g=np.diag(g_diag), f=f_mat)
        atoms.append(((1.0 - w0) / big_n, mode))

    if w0 > 0:
        miss = ModeRealization.create(
            a,
            c=c,
            h=np.zeros((big_n, a.shape[0])),
            g=window.g_cl * np.eye(big_n),
            f=np.repeat(ha, big_n, axis=0),
        )
        atoms.append((w0, miss))

    return ModeDistribution(atoms=tuple(atoms))


def averaged_measurement_gain(k_gain: np.ndarray, n_detections: int) -> np.ndarray:
    """
    Common block Psi of a block-equal gain K = [Psi ... Psi].

    With such a gain K y = N Psi y_bar, so the update is driven by the scan
    average alone.
    """
    blocks = np.split(np.asarray(k_gain), n_detections, axis=1)
    return np.mean(blocks, axis=0)
