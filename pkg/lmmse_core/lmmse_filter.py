"""
LMMSE Recursive Filter

Recursive linear minimum mean squared error estimator for white-mode jump
linear systems with estimate-feedback terms. Each step propagates the carried
moments (E[x], Sigma, Lambda, Upsilon, Delta), forms the innovation
covariances, derives the gains K, L, J and applies

    x_hat_{k+1} = L x_hat_k + K y_{k+1} + J u_k
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    ConfigurationError,
    CovarianceError,
    DimensionMismatchError,
)
from .expectations import (
    DynamicsExpectations,
    MeasurementExpectations,
    dynamics_expectations,
    measurement_expectations,
)
from .linalg import min_eigenvalue, right_solve_psd, symmetrize
from .system import ModeDistribution, ModeRealization, SystemSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilterState:
    """
    Estimate and carried moments at time k.

    Attributes:
        k: Time index
        x_hat: LMMSE estimate of x_k
        ex: E[x_k]
        sigma: E[x_k x_k^T]
        lam: E[x_hat_k x_hat_k^T] (equal to E[x_hat_k x_k^T])
        upsilon: E[x_k] u_k^T
        delta: u_k u_k^T
    """

    k: int
    x_hat: np.ndarray
    ex: np.ndarray
    sigma: np.ndarray
    lam: np.ndarray
    upsilon: np.ndarray
    delta: np.ndarray

    @property
    def n(self) -> int:
        return self.x_hat.shape[0]

    @property
    def p(self) -> int:
        return self.upsilon.shape[1]

    @property
    def error_moment(self) -> np.ndarray:
        """E[(x - x_hat)(x - x_hat)^T] = Sigma - Lambda."""
        return self.sigma - self.lam


@dataclass(frozen=True)
class GainSet:
    """Gains of one step and the covariances they came from."""

    k_gain: np.ndarray
    l_gain: np.ndarray
    j_gain: np.ndarray
    gamma_xy: np.ndarray
    gamma_yy: np.ndarray
    used_pinv: bool = False


@dataclass(frozen=True)
class MomentStep:
    """Data-independent part of one recursion step."""

    gains: GainSet
    ex: np.ndarray
    sigma: np.ndarray
    lam: np.ndarray
    upsilon: np.ndarray
    delta: np.ndarray


def _empty_measurement(n: int) -> MeasurementExpectations:
    empty = np.zeros((0, 0))
    return MeasurementExpectations(
        eh=np.zeros((0, n)),
        ef=np.zeros((0, n)),
        egg=empty,
        ehsh=empty,
        eflf=empty,
        ehxf=empty,
    )


def _as_input(u: Optional[np.ndarray], p: int) -> np.ndarray:
    if u is None:
        return np.zeros(p)
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (p,):
        raise DimensionMismatchError("input u", (p,), u.shape)
    return u


class LmmseFilter:
    """
    Recursive LMMSE filter.

    States are immutable; every step returns a new FilterState.
    """

    def __init__(self, pinv_rcond: float = 1e-12, psd_tolerance: float = 1e-8):
        """
        Initialize the filter.

        Args:
            pinv_rcond: Relative eigenvalue cutoff of the Gamma_yy pseudo-inverse
            psd_tolerance: Allowed negative eigenvalue of Sigma - Lambda,
                relative to max(1, |Sigma|)
        """
        self.pinv_rcond = pinv_rcond
        self.psd_tolerance = psd_tolerance

    def initial_state(
        self,
        x0_mean: np.ndarray,
        p0: np.ndarray,
        u0: Optional[np.ndarray] = None,
    ) -> FilterState:
        """
        Initial estimate and moments: x_hat = E[x] = x0_mean,
        Sigma = P0 + x0 x0^T, Lambda = x0 x0^T.

        Args:
            x0_mean: Initial state mean
            p0: Initial state covariance
            u0: First input (None for a system without input)

        Raises:
            ConfigurationError: If P0 is not symmetric
        """
        x0 = np.asarray(x0_mean, dtype=float).reshape(-1)
        p0 = np.atleast_2d(np.asarray(p0, dtype=float))
        n = x0.shape[0]
        if p0.shape != (n, n):
            raise DimensionMismatchError("P0", (n, n), p0.shape)
        scale = max(1.0, float(np.max(np.abs(p0), initial=0.0)))
        if np.max(np.abs(p0 - p0.T), initial=0.0) > 1e-12 * scale:
            raise ConfigurationError("P0 is not symmetric", key="p0")

        u0 = np.zeros(0) if u0 is None else np.asarray(u0, dtype=float).reshape(-1)
        outer = np.outer(x0, x0)
        return FilterState(
            k=0,
            x_hat=x0.copy(),
            ex=x0.copy(),
            sigma=p0 + outer,
            lam=outer,
            upsilon=np.outer(x0, u0),
            delta=np.outer(u0, u0),
        )

    def predict_moments(
        self, state: FilterState, dyn: DynamicsExpectations, u_k: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Propagate E[x] and Sigma one step.

        Returns:
            Tuple of (E[x_{k+1}], Sigma_{k+1})
        """
        u = _as_input(u_k, dyn.eb.shape[1])
        ex_next = dyn.ea @ state.ex + dyn.eb @ u
        sigma_next = dyn.easa + dyn.eaub + dyn.eaub.T + dyn.ebdb + dyn.ecc
        return ex_next, symmetrize(sigma_next)

    def _predicted_estimate_moment(
        self, state: FilterState, dyn: DynamicsExpectations
    ) -> np.ndarray:
        # E[x_hat^- x_hat^-T] for x_hat^- = E[A] x_hat + E[B] u
        ea, eb = dyn.ea, dyn.eb
        return ea @ (state.lam @ ea.T + state.upsilon @ eb.T) + eb @ (
            state.upsilon.T @ ea.T + state.delta @ eb.T
        )

    def innovation_covariances(
        self,
        state: FilterState,
        sigma_next: np.ndarray,
        dyn: DynamicsExpectations,
        meas: MeasurementExpectations,
        u_k: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Gamma_xy and Gamma_yy of the innovation y_{k+1} - y_hat^-.

        Gamma_yy is assembled term by term and then symmetrized.

        Returns:
            Tuple of (Gamma_xy, Gamma_yy)
        """
        ea, eb = dyn.ea, dyn.eb
        eh, ef = meas.eh, meas.ef
        lam, ups = state.lam, state.upsilon
        u = _as_input(u_k, eb.shape[1])

        gamma_xy = (sigma_next - self._predicted_estimate_moment(state, dyn)) @ eh.T

        ey_next = (eh @ ea + ef) @ state.ex + eh @ eb @ u
        eha = eh @ ea
        gamma_yy = (
            meas.ehsh
            + meas.egg
            + meas.eflf
            - ef @ lam @ ef.T
            - eha @ lam @ eha.T
            + meas.ehxf
            + meas.ehxf.T
            - eha @ lam @ ef.T
            - ef @ lam @ eha.T
            - eha @ ups @ eb.T @ eh.T
            - ef @ ups @ eb.T @ eh.T
            - np.outer(eh @ eb @ u, ey_next)
        )
        return gamma_xy, symmetrize(gamma_yy)

    def gains(
        self,
        gamma_xy: np.ndarray,
        gamma_yy: np.ndarray,
        dyn: DynamicsExpectations,
        meas: MeasurementExpectations,
    ) -> GainSet:
        """
        K = Gamma_xy Gamma_yy^{-1}, L = (I - K E[H]) E[A] - K E[F],
        J = (I - K E[H]) E[B].

        Gamma_yy is factored by Cholesky; when it is not positive definite the
        eigendecomposition pseudo-inverse is used and a warning is logged.
        """
        k_gain, used_pinv = right_solve_psd(gamma_xy, gamma_yy, self.pinv_rcond)
        if used_pinv:
            logger.warning(
                "Gamma_yy is singular (m=%d); using pseudo-inverse", gamma_yy.shape[0]
            )
        residual = np.eye(dyn.ea.shape[0]) - k_gain @ meas.eh
        return GainSet(
            k_gain=k_gain,
            l_gain=residual @ dyn.ea - k_gain @ meas.ef,
            j_gain=residual @ dyn.eb,
            gamma_xy=gamma_xy,
            gamma_yy=gamma_yy,
            used_pinv=used_pinv,
        )

    def moment_step(
        self,
        state: FilterState,
        dyn: DynamicsExpectations,
        meas: Optional[MeasurementExpectations],
        u_k: Optional[np.ndarray] = None,
        u_next: Optional[np.ndarray] = None,
    ) -> MomentStep:
        """
        Moment propagation and gains from precomputed expectations.

        meas=None gives the predict-only step (m = 0, K empty).

        Raises:
            CovarianceError: If Sigma - Lambda loses PSD beyond tolerance
        """
        if meas is None:
            meas = _empty_measurement(state.n)
        u = _as_input(u_k, dyn.eb.shape[1])
        if u_next is None:
            u_new = np.zeros_like(u)
        else:
            u_new = np.asarray(u_next, dtype=float).reshape(-1)

        ex_next, sigma_next = self.predict_moments(state, dyn, u)
        gamma_xy, gamma_yy = self.innovation_covariances(state, sigma_next, dyn, meas, u)
        gain_set = self.gains(gamma_xy, gamma_yy, dyn, meas)

        k_gain = gain_set.k_gain
        lam_next = (
            (gain_set.l_gain + k_gain @ meas.ef)
            @ (state.lam @ dyn.ea.T + state.upsilon @ dyn.eb.T)
            + gain_set.j_gain @ (state.upsilon.T @ dyn.ea.T + state.delta @ dyn.eb.T)
            + k_gain @ meas.eh @ sigma_next
        )
        lam_next = symmetrize(lam_next)

        self._check_error_moment(state.k + 1, sigma_next, lam_next)
        return MomentStep(
            gains=gain_set,
            ex=ex_next,
            sigma=sigma_next,
            lam=lam_next,
            upsilon=np.outer(ex_next, u_new),
            delta=np.outer(u_new, u_new),
        )

    def _check_error_moment(
        self, step: int, sigma: np.ndarray, lam: np.ndarray
    ) -> None:
        tolerance = self.psd_tolerance * max(1.0, float(np.max(np.abs(sigma))))
        lowest = min_eigenvalue(sigma - lam)
        if lowest < -tolerance:
            raise CovarianceError(step, lowest)

    def advance_moments(
        self,
        state: FilterState,
        dist_k: ModeDistribution,
        dist_next: Optional[ModeDistribution],
        u_k: Optional[np.ndarray] = None,
        u_next: Optional[np.ndarray] = None,
    ) -> MomentStep:
        """
        Data-independent part of one step from the mode distributions.

        Args:
            state: Current state
            dist_k: Mode law at time k (dynamics side)
            dist_next: Mode law at time k+1 (measurement side); None for
                predict-only
            u_k: Input at time k
            u_next: Input at time k+1
        """
        dyn = dynamics_expectations(dist_k, state.sigma, state.upsilon, state.delta)
        meas = None
        if dist_next is not None:
            _, sigma_next = self.predict_moments(state, dyn, u_k)
            meas = measurement_expectations(
                dist_next, sigma_next, state.lam, dyn.ea, dyn.eb, state.upsilon
            )
        return self.moment_step(state, dyn, meas, u_k, u_next)

    def apply(
        self,
        state: FilterState,
        step: MomentStep,
        y: Optional[np.ndarray],
        u_k: Optional[np.ndarray] = None,
    ) -> FilterState:
        """
        Estimate recursion x_hat_{k+1} = L x_hat_k + K y_{k+1} + J u_k.

        Raises:
            DimensionMismatchError: If y does not have the step's dimension m
        """
        gain_set = step.gains
        m = gain_set.k_gain.shape[1]
        y_vec = np.zeros(0) if y is None else np.asarray(y, dtype=float).reshape(-1)
        if y_vec.shape != (m,):
            raise DimensionMismatchError("measurement y", (m,), y_vec.shape)
        u = _as_input(u_k, gain_set.j_gain.shape[1])

        x_hat = gain_set.l_gain @ state.x_hat + gain_set.k_gain @ y_vec + gain_set.j_gain @ u
        return FilterState(
            k=state.k + 1,
            x_hat=x_hat,
            ex=step.ex,
            sigma=step.sigma,
            lam=step.lam,
            upsilon=step.upsilon,
            delta=step.delta,
        )

    def update(
        self,
        state: FilterState,
        y: np.ndarray,
        u_k: Optional[np.ndarray],
        u_next: Optional[np.ndarray],
        dist_k: ModeDistribution,
        dist_next: ModeDistribution,
    ) -> FilterState:
        """
        One full recursion step with measurement y_{k+1}.

        Returns:
            FilterState at time k+1
        """
        step = self.advance_moments(state, dist_k, dist_next, u_k, u_next)
        return self.apply(state, step, y, u_k)

    def update_with(
        self,
        state: FilterState,
        y: np.ndarray,
        dyn: DynamicsExpectations,
        meas: MeasurementExpectations,
        u_k: Optional[np.ndarray] = None,
        u_next: Optional[np.ndarray] = None,
    ) -> FilterState:
        """Same as update() with precomputed expectations."""
        step = self.moment_step(state, dyn, meas, u_k, u_next)
        return self.apply(state, step, y, u_k)

    def predict_only(
        self,
        state: FilterState,
        dist_k: ModeDistribution,
        u_k: Optional[np.ndarray] = None,
        u_next: Optional[np.ndarray] = None,
    ) -> FilterState:
        """Time update without measurement (K = 0, L = E[A], J = E[B])."""
        step = self.advance_moments(state, dist_k, None, u_k, u_next)
        return self.apply(state, step, None, u_k)


def fold_feedback(dist: ModeDistribution) -> ModeDistribution:
    """
    Substitute u_k = x_hat_k into every atom: A -> A + B, B -> 0.

    Raises:
        DimensionMismatchError: If B is not n x n
    """
    atoms = []
    for weight, mode in dist.atoms:
        if mode.b.shape != mode.a.shape:
            raise DimensionMismatchError("B for estimate feedback", mode.a.shape, mode.b.shape)
        folded = ModeRealization(
            a=mode.a + mode.b,
            b=np.zeros_like(mode.b),
            c=mode.c,
            h=mode.h,
            g=mode.g,
            f=mode.f,
        )
        atoms.append((weight, folded))
    return ModeDistribution(atoms=tuple(atoms))


def feedback_variant(spec: SystemSpec) -> SystemSpec:
    """
    Equivalent zero-input problem for a FeedbackEstimate system.

    Every atom's A becomes A + B and B is zeroed; u, Upsilon and Delta are zero.

    Raises:
        ConfigurationError: If the system does not use estimate feedback
        DimensionMismatchError: If p != n
    """
    if not spec.feedback:
        raise ConfigurationError(
            "feedback_variant requires the FeedbackEstimate input policy",
            key="input_policy",
        )
    law = spec.mode_law
    # fail early on a non-square B
    fold_feedback(law(0))

    def folded_law(k: int) -> ModeDistribution:
        return fold_feedback(law(k))

    return SystemSpec(x0_mean=spec.x0_mean, p0=spec.p0, mode_law=folded_law)


def run_filter(
    spec: SystemSpec,
    measurements: Sequence[np.ndarray],
    estimator: Optional[LmmseFilter] = None,
) -> List[FilterState]:
    """
    Run the recursion over y_1..y_T.

    FeedbackEstimate systems are filtered through feedback_variant().

    Args:
        spec: System specification
        measurements: y_1..y_T
        estimator: Filter instance (default settings when omitted)

    Returns:
        States at times 0..T
    """
    estimator = estimator or LmmseFilter()
    if spec.feedback:
        spec = feedback_variant(spec)

    state = estimator.initial_state(spec.x0_mean, spec.p0, spec.input_at(0))
    states = [state]
    dist_k = spec.mode_law(0)
    for k, y in enumerate(measurements):
        dist_next = spec.mode_law(k + 1)
        state = estimator.update(
            state, y, spec.input_at(k), spec.input_at(k + 1), dist_k, dist_next
        )
        states.append(state)
        dist_k = dist_next
    return states
