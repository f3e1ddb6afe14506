"""
LMMSE Benchmark

Monte-Carlo tracking-in-clutter experiment: trajectory simulation, per-filter
gating and track-loss detection, RMSE truncated at the first loss, and
aggregation over runs and clutter densities.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
from joblib import Parallel, delayed

from .baselines import KfState, innovation_variance, kf_predict, nn_step, pda_step
from .clutter import Scan, ScanDraws, Window, assemble_scan, make_window, miss_probability
from .exceptions import ConfigurationError, RunIndexError
from .expectations import clutter_expectations, dynamics_expectations
from .linalg import psd_sqrt
from .lmmse_filter import FilterState, LmmseFilter
from .models import (
    AggregateResult,
    ClutterParams,
    DensityResult,
    ExperimentConfig,
    FilterName,
    FilterSummary,
)
from .system import ModeDistribution, ModeRealization

logger = logging.getLogger(__name__)

THREADS_ENV = "MODAL_LMMSE_THREADS"
LOSS_STREAK = 3


@dataclass(frozen=True)
class GateEvent:
    """Gate outcome of the target's measurement at one step."""

    step: int
    detected: bool
    in_gate: bool


class TrackLossMonitor:
    """
    Streaming track-loss detector.

    A loss is declared at the third consecutive step on which a detected
    target's measurement falls outside the window. Steps without detection
    neither extend nor reset the streak.
    """

    def __init__(self, streak_length: int = LOSS_STREAK):
        self.streak_length = streak_length
        self.streak = 0
        self.loss_time: Optional[int] = None

    def observe(self, event: GateEvent) -> Optional[int]:
        """Record one step; returns the loss step once it has occurred."""
        if self.loss_time is not None or not event.detected:
            return self.loss_time
        self.streak = 0 if event.in_gate else self.streak + 1
        if self.streak >= self.streak_length:
            self.loss_time = event.step
        return self.loss_time


def detect_track_loss(history: Iterable[GateEvent]) -> Optional[int]:
    """Step of the track loss in an ordered gate history, or None."""
    monitor = TrackLossMonitor()
    for event in history:
        if monitor.observe(event) is not None:
            break
    return monitor.loss_time


class LmmseTracker:
    """LMMSE filter on the clutter mode law."""

    name = FilterName.LMMSE

    def __init__(self, config: ExperimentConfig, params: ClutterParams):
        system = config.system
        self.params = params
        self.a = system.a_matrix
        self.estimator = LmmseFilter()
        self.dynamics = ModeDistribution.deterministic(
            ModeRealization.create(self.a, c=system.c_matrix)
        )
        self.miss_weight = (
            miss_probability(params, config.miss_rule) if config.misses else 0.0
        )
        self.state: FilterState = self.estimator.initial_state(
            system.x0_vector, system.p0_matrix
        )
        self.gain_norm = 0.0
        self._dyn = None
        self._sigma_next: Optional[np.ndarray] = None

    @property
    def x_hat(self) -> np.ndarray:
        return self.state.x_hat

    def window(self) -> Window:
        state = self.state
        self._dyn = dynamics_expectations(
            self.dynamics, state.sigma, state.upsilon, state.delta
        )
        _, self._sigma_next = self.estimator.predict_moments(state, self._dyn)
        h = self.params.h_row
        s = (h @ (self._sigma_next - self.a @ state.lam @ self.a.T) @ h.T).item()
        return make_window(state.x_hat, self.a, self.params, s + self.params.g_nom**2)

    def ingest(self, scan: Scan) -> None:
        if scan.n == 0:
            step = self.estimator.moment_step(self.state, self._dyn, None)
            self.gain_norm = 0.0
            self.state = self.estimator.apply(self.state, step, None)
            return
        meas = clutter_expectations(
            self.params,
            scan.n,
            self.a,
            self._sigma_next,
            self.state.lam,
            scan.window,
            self.miss_weight,
        )
        step = self.estimator.moment_step(self.state, self._dyn, meas)
        self.gain_norm = float(np.linalg.norm(step.gains.k_gain))
        self.state = self.estimator.apply(self.state, step, scan.values)


class _KalmanTracker:
    name: FilterName

    def __init__(self, config: ExperimentConfig, params: ClutterParams):
        system = config.system
        self.params = params
        self.a = system.a_matrix
        self.c = system.c_matrix
        self.h = params.h_row
        self.g = np.array([[params.g_nom]])
        self.state = KfState(x_hat=system.x0_vector, p=system.p0_matrix)

    @property
    def x_hat(self) -> np.ndarray:
        return self.state.x_hat

    def window(self) -> Window:
        pred = kf_predict(self.state, self.a, self.c)
        s = float(innovation_variance(pred.p, self.h, self.g)[0, 0])
        return make_window(self.state.x_hat, self.a, self.params, s)


class NearestNeighborTracker(_KalmanTracker):
    """Kalman filter driven by the nearest gated measurement."""

    name = FilterName.NN

    def ingest(self, scan: Scan) -> None:
        self.state = nn_step(self.state, scan, self.a, self.c, self.h, self.g)


class PdaTracker(_KalmanTracker):
    """Parametric PDA filter."""

    name = FilterName.PDA

    def ingest(self, scan: Scan) -> None:
        step = pda_step(self.state, scan, self.a, self.c, self.h, self.g, self.params)
        self.state = step.state


Tracker = Union[LmmseTracker, NearestNeighborTracker, PdaTracker]

TRACKERS = {
    FilterName.LMMSE: LmmseTracker,
    FilterName.NN: NearestNeighborTracker,
    FilterName.PDA: PdaTracker,
}


@dataclass
class RunRecord:
    """
    Outcome of one Monte-Carlo run.

    Attributes:
        horizon: Steps simulated
        loss_times: Loss step per filter (None if track was kept)
        errors: Position error per filter for steps 1..truncation_time
        truncation_time: First loss across filters, or the horizon
        trace: Per-step rows when tracing was requested
    """

    horizon: int
    loss_times: Dict[FilterName, Optional[int]]
    errors: Dict[FilterName, List[float]]
    truncation_time: int
    trace: List[Dict[str, float]] = field(default_factory=list)

    def rmse(self, name: FilterName) -> float:
        errors = np.asarray(self.errors[name][: self.truncation_time])
        return float(np.sqrt(np.mean(errors**2)))

    def loss_time(self, name: FilterName) -> int:
        """Loss step, with a kept track counted as the horizon."""
        loss = self.loss_times[name]
        return self.horizon if loss is None else loss


def run_rng(seed: int, rho_index: int, run_index: int) -> np.random.Generator:
    """Independent stream for one (density, run) pair."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(rho_index, run_index))
    )


def _trace_row(
    step: int,
    x: np.ndarray,
    trackers: Dict[FilterName, Tracker],
    scans: Dict[FilterName, Scan],
) -> Dict[str, float]:
    row: Dict[str, float] = {"step": step}
    for i, value in enumerate(x):
        row[f"true_x{i}"] = float(value)
    for name, tracker in trackers.items():
        prefix = name.value
        for i, value in enumerate(tracker.x_hat):
            row[f"{prefix}_x{i}"] = float(value)
        scan = scans[name]
        row[f"{prefix}_n"] = scan.n
        row[f"{prefix}_lower"] = scan.window.lower
        row[f"{prefix}_upper"] = scan.window.upper
        if isinstance(tracker, LmmseTracker):
            row[f"{prefix}_gain_norm"] = tracker.gain_norm
    return row


def simulate_run(
    config: ExperimentConfig, rho_index: int, run_index: int, trace: bool = False
) -> RunRecord:
    """
    Simulate one trajectory and run every configured filter on it.

    All filters share the true trajectory and the unit draws of each scan;
    each gates with its own window. A filter stops after its own track loss
    unless tracing, in which case all filters run to the horizon.

    Args:
        config: Experiment configuration
        rho_index: Index into config.densities
        run_index: Monte-Carlo run index
        trace: Collect one row per step

    Returns:
        RunRecord
    """
    params = config.clutter.with_density(config.densities[rho_index])
    system = config.system
    rng = run_rng(config.seed, rho_index, run_index)
    a, c = system.a_matrix, system.c_matrix

    x = system.x0_vector + psd_sqrt(system.p0_matrix) @ rng.standard_normal(system.n)
    trackers: Dict[FilterName, Tracker] = {
        name: TRACKERS[name](config, params) for name in config.filters
    }
    monitors = {name: TrackLossMonitor() for name in config.filters}
    errors: Dict[FilterName, List[float]] = {name: [] for name in config.filters}
    loss_times: Dict[FilterName, Optional[int]] = {name: None for name in config.filters}
    rows: List[Dict[str, float]] = []

    for step in range(1, config.horizon + 1):
        x = a @ x + c @ rng.standard_normal(c.shape[1])
        draws = ScanDraws.sample(rng)

        scans: Dict[FilterName, Scan] = {}
        for name, tracker in trackers.items():
            if loss_times[name] is not None and not trace:
                continue
            scan = assemble_scan(x, tracker.window(), params, draws)
            tracker.ingest(scan)
            scans[name] = scan
            errors[name].append(float(tracker.x_hat[0] - x[0]))
            event = GateEvent(step=step, detected=scan.detected, in_gate=scan.in_gate)
            if loss_times[name] is None:
                loss_times[name] = monitors[name].observe(event)

        if trace:
            rows.append(_trace_row(step, x, trackers, scans))
        elif all(loss is not None for loss in loss_times.values()):
            break

    losses = [loss for loss in loss_times.values() if loss is not None]
    truncation = min(losses) if losses else config.horizon
    return RunRecord(
        horizon=config.horizon,
        loss_times=loss_times,
        errors={name: errs[:truncation] for name, errs in errors.items()},
        truncation_time=truncation,
        trace=rows,
    )


def trace_run(
    config: ExperimentConfig, run_index: int, rho_index: int = 0
) -> List[Dict[str, float]]:
    """
    Per-step trace rows of one run.

    Raises:
        RunIndexError: If run_index >= config.runs
    """
    if not 0 <= run_index < config.runs:
        raise RunIndexError(run_index, config.runs)
    return simulate_run(config, rho_index, run_index, trace=True).trace


def resolve_workers(requested: Optional[int] = None, tasks: Optional[int] = None) -> int:
    """
    Number of worker processes.

    Defaults to the CPU count, capped by the MODAL_LMMSE_THREADS environment
    variable and by the number of tasks.

    Raises:
        ConfigurationError: If MODAL_LMMSE_THREADS is not a positive integer
    """
    workers = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap is not None and cap.strip():
        try:
            limit = int(cap)
        except ValueError:
            limit = 0
        if limit < 1:
            raise ConfigurationError(
                f"{THREADS_ENV} must be a positive integer, got '{cap}'",
                suggestions=[f"Unset {THREADS_ENV} or set it to e.g. 4"],
                key=THREADS_ENV,
            )
        workers = min(workers, limit)
    if tasks is not None:
        workers = min(workers, max(1, tasks))
    return workers


def _run_task(config: ExperimentConfig, rho_index: int, run_index: int) -> RunRecord:
    return simulate_run(config, rho_index, run_index)


def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def _summarize(
    config: ExperimentConfig, rho: float, records: List[RunRecord]
) -> DensityResult:
    summaries = []
    for name in config.filters:
        rmse = np.array([record.rmse(name) for record in records])
        loss = np.array([record.loss_time(name) for record in records], dtype=float)
        summaries.append(
            FilterSummary(
                filter=name,
                mean_rmse=float(np.mean(rmse)),
                rmse_stderr=_stderr(rmse),
                mean_loss_time=float(np.mean(loss)),
                loss_time_stderr=_stderr(loss),
                runs=len(records),
            )
        )
    return DensityResult(rho=rho, filters=summaries)


def run_experiment(config: ExperimentConfig) -> AggregateResult:
    """
    Run the full density sweep.

    Runs are dispatched to joblib workers; one worker runs in-process.
    Results are reduced in (density, run) order, so the aggregate does not
    depend on completion order.

    Args:
        config: Experiment configuration

    Returns:
        AggregateResult
    """
    rho_indices = [i for i in range(len(config.densities)) for _ in range(config.runs)]
    run_indices = [r for _ in config.densities for r in range(config.runs)]
    workers = resolve_workers(config.workers, len(rho_indices))
    logger.debug("Running %d runs on %d worker(s)", len(rho_indices), workers)

    records: List[RunRecord] = Parallel(n_jobs=workers, batch_size="auto")(
        delayed(_run_task)(config, i, r) for i, r in zip(rho_indices, run_indices)
    )

    densities = []
    for i, rho in enumerate(config.densities):
        chunk = records[i * config.runs : (i + 1) * config.runs]
        result = _summarize(config, rho, chunk)
        densities.append(result)
        logger.info(
            "rho=%g: %s",
            rho,
            ", ".join(
                f"{s.filter.value} rmse={s.mean_rmse:.3f} loss={s.mean_loss_time:.1f}"
                for s in result.filters
            ),
        )

    return AggregateResult(seed=config.seed, horizon=config.horizon, densities=densities)
