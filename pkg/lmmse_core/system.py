"""
LMMSE System Model

Jump linear systems whose mode switches as a white process, with
estimate-feedback terms in the dynamics and the measurement equation:

    x_{k+1} = A_k x_k + B_k u_k + C_k w_k
    y_k     = H_k x_k + G_k v_k + F_k x_hat_{k-1}
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ConfigurationError, DimensionMismatchError, ModeDistributionError
from .linalg import min_eigenvalue, psd_sqrt
from .models import ValidationResult

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], Sequence[Sequence[float]], np.ndarray]

WEIGHT_TOLERANCE = 1e-12


def _as_matrix(value: Optional[ArrayLike], rows: int, cols: int) -> np.ndarray:
    if value is None:
        return np.zeros((rows, cols))
    return np.atleast_2d(np.asarray(value, dtype=float))


def _as_vector(value: ArrayLike) -> np.ndarray:
    return np.atleast_1d(np.asarray(value, dtype=float))


@dataclass(frozen=True)
class ModeRealization:
    """
    One joint draw of the six system matrices.

    Attributes:
        a: n x n state transition
        b: n x p input gain
        c: n x q process-noise shaping
        h: m x n observation
        g: m x r measurement-noise shaping
        f: m x n estimate-feedback observation term
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    h: np.ndarray
    g: np.ndarray
    f: np.ndarray

    def __post_init__(self) -> None:
        n = self.a.shape[0]
        if self.a.shape != (n, n):
            raise DimensionMismatchError("A", (n, n), self.a.shape)
        for name, mat in (("B", self.b), ("C", self.c)):
            if mat.shape[0] != n:
                raise DimensionMismatchError(f"{name} rows", (n,), (mat.shape[0],))
        m = self.h.shape[0]
        for name, mat in (("G", self.g), ("F", self.f)):
            if mat.shape[0] != m:
                raise DimensionMismatchError(f"{name} rows", (m,), (mat.shape[0],))
        for name, mat in (("H", self.h), ("F", self.f)):
            if mat.shape[1] != n:
                raise DimensionMismatchError(f"{name} columns", (n,), (mat.shape[1],))

    @classmethod
    def create(
        cls,
        a: ArrayLike,
        b: Optional[ArrayLike] = None,
        c: Optional[ArrayLike] = None,
        h: Optional[ArrayLike] = None,
        g: Optional[ArrayLike] = None,
        f: Optional[ArrayLike] = None,
    ) -> "ModeRealization":
        """
        Build a realization, filling omitted matrices.

        Scalars become 1x1 matrices and 1-D sequences become single rows.
        Omitted B, C and G become zero-width blocks (no input, no noise);
        omitted H or F become zero matrices of the measurement dimension.

        Raises:
            DimensionMismatchError: If the matrices are inconsistent
        """
        a_mat = np.atleast_2d(np.asarray(a, dtype=float))
        n = a_mat.shape[0]
        if h is not None:
            m = np.atleast_2d(np.asarray(h, dtype=float)).shape[0]
        elif f is not None:
            m = np.atleast_2d(np.asarray(f, dtype=float)).shape[0]
        elif g is not None:
            m = np.atleast_2d(np.asarray(g, dtype=float)).shape[0]
        else:
            m = 0
        return cls(
            a=a_mat,
            b=_as_matrix(b, n, 0),
            c=_as_matrix(c, n, 0),
            h=_as_matrix(h, m, n),
            g=_as_matrix(g, m, 0),
            f=_as_matrix(f, m, n),
        )

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.b.shape[1]

    @property
    def q(self) -> int:
        return self.c.shape[1]

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def r(self) -> int:
        return self.g.shape[1]

    @property
    def dims(self) -> Tuple[int, int, int, int, int]:
        return (self.n, self.p, self.q, self.m, self.r)


@dataclass(frozen=True)
class ModeDistribution:
    """Finite-support law of the mode at one time index."""

    atoms: Tuple[Tuple[float, ModeRealization], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple((float(w), r) for w, r in self.atoms))

    @classmethod
    def deterministic(cls, mode: ModeRealization) -> "ModeDistribution":
        """Distribution with a single atom of weight one."""
        return cls(atoms=((1.0, mode),))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.atoms])

    @property
    def realizations(self) -> List[ModeRealization]:
        return [r for _, r in self.atoms]

    @property
    def n(self) -> int:
        return self.atoms[0][1].n

    @property
    def p(self) -> int:
        return self.atoms[0][1].p

    @property
    def q(self) -> int:
        return self.atoms[0][1].q

    @property
    def m(self) -> int:
        return self.atoms[0][1].m

    @property
    def r(self) -> int:
        return self.atoms[0][1].r

    def draw(self, rng: np.random.Generator) -> int:
        """Draw an atom index according to the weights."""
        cumulative = np.cumsum(self.weights)
        index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        return min(index, len(self.atoms) - 1)

    def validate(self) -> ValidationResult:
        """
        Check the weight and dimension invariants.

        Returns:
            ValidationResult listing every violation
        """
        errors: List[str] = []
        warnings: List[str] = []

        if not self.atoms:
            return ValidationResult(valid=False, errors=["distribution has no atoms"])

        weights = self.weights
        if np.any(weights < 0) or np.any(weights > 1):
            errors.append("weights outside [0, 1]")
        total = float(np.sum(weights))
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            errors.append(f"weights sum to {total:.12g}")

        first = self.atoms[0][1]
        checks = (
            ("state dims differ", lambda r: r.n),
            ("input dims differ", lambda r: r.p),
            ("process noise dims differ", lambda r: r.q),
            ("measurement dims differ", lambda r: r.m),
            ("measurement noise dims differ", lambda r: r.r),
        )
        for message, dim in checks:
            if any(dim(r) != dim(first) for r in self.realizations):
                errors.append(message)

        if np.any(weights == 0):
            warnings.append("distribution has zero-weight atoms")

        return ValidationResult(valid=not errors, errors=errors, warnings=warnings)

    def require_valid(self) -> "ModeDistribution":
        """
        Raise if the distribution violates its invariants.

        Raises:
            ModeDistributionError: If validate() reports any violation
        """
        result = self.validate()
        if not result.valid:
            raise ModeDistributionError(result.errors)
        return self


def validate(dist: ModeDistribution) -> ValidationResult:
    """Return all invariant violations of a mode distribution."""
    return dist.validate()


@dataclass(frozen=True)
class DeterministicInput:
    """Known input sequence u_0..u_T, one row per time index."""

    inputs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.inputs, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        object.__setattr__(self, "inputs", arr)

    def at(self, k: int) -> np.ndarray:
        if k >= self.inputs.shape[0]:
            raise DimensionMismatchError(
                "input sequence length", (k + 1,), (self.inputs.shape[0],)
            )
        return self.inputs[k]


@dataclass(frozen=True)
class FeedbackEstimate:
    """Input policy u_k = x_hat_k."""


InputPolicy = Union[DeterministicInput, FeedbackEstimate, None]
ModeLaw = Callable[[int], ModeDistribution]


@dataclass(frozen=True)
class SystemSpec:
    """
    Complete problem statement for the filter and the simulator.

    Attributes:
        x0_mean: Initial state mean
        p0: Initial state covariance
        mode_law: Mode distribution for each time index
        input_policy: Deterministic inputs, estimate feedback, or None for u = 0
    """

    x0_mean: np.ndarray
    p0: np.ndarray
    mode_law: ModeLaw
    input_policy: InputPolicy = None

    def __post_init__(self) -> None:
        x0 = _as_vector(self.x0_mean)
        p0 = np.atleast_2d(np.asarray(self.p0, dtype=float))
        object.__setattr__(self, "x0_mean", x0)
        object.__setattr__(self, "p0", p0)

        n = x0.shape[0]
        if p0.shape != (n, n):
            raise DimensionMismatchError("P0", (n, n), p0.shape)
        scale = max(1.0, float(np.max(np.abs(p0))))
        if np.max(np.abs(p0 - p0.T)) > 1e-12 * scale:
            raise ConfigurationError(
                "P0 is not symmetric",
                suggestions=["Pass a symmetric covariance matrix"],
                key="p0",
            )
        if min_eigenvalue(p0) < -1e-10 * scale:
            raise ConfigurationError(
                "P0 is not positive semi-definite",
                suggestions=["Pass a PSD covariance matrix"],
                key="p0",
            )

    @property
    def n(self) -> int:
        return self.x0_mean.shape[0]

    @property
    def feedback(self) -> bool:
        return isinstance(self.input_policy, FeedbackEstimate)

    def input_at(self, k: int, x_hat: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Input u_k applied at time k.

        Args:
            k: Time index
            x_hat: Current estimate, required under FeedbackEstimate

        Returns:
            p-vector (empty when the system has no input)
        """
        if isinstance(self.input_policy, DeterministicInput):
            return self.input_policy.at(k)
        if isinstance(self.input_policy, FeedbackEstimate):
            if x_hat is None:
                raise ConfigurationError(
                    "Estimate feedback requires the current estimate",
                    key="input_policy",
                )
            return np.asarray(x_hat, dtype=float)
        return np.zeros(self.mode_law(k).p)


@dataclass(frozen=True)
class NoiseDraw:
    """Process noise w_k and measurement noise v_{k+1} of one step."""

    w: np.ndarray
    v: np.ndarray

    @classmethod
    def sample(cls, rng: np.random.Generator, q: int, r: int) -> "NoiseDraw":
        """Draw zero-mean, identity-covariance Gaussian noises."""
        return cls(w=rng.standard_normal(q), v=rng.standard_normal(r))


def sample_noise(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """Draw count i.i.d. standard normal vectors as a count x dim array."""
    return rng.standard_normal((count, dim))


@dataclass
class Trajectory:
    """Simulated closed-loop trajectory."""

    states: np.ndarray
    estimates: np.ndarray
    measurements: List[np.ndarray] = field(default_factory=list)
    modes: List[int] = field(default_factory=list)
    noises: List[NoiseDraw] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return self.states.shape[0] - 1


def step_state(
    x: ArrayLike, mode: ModeRealization, u: ArrayLike, w: ArrayLike
) -> np.ndarray:
    """
    Advance the state: A x + B u + C w.

    Raises:
        DimensionMismatchError: If any vector does not fit the mode
    """
    x, u, w = (np.asarray(v, dtype=float).reshape(-1) for v in (x, u, w))
    for what, vec, size in (("x", x, mode.n), ("u", u, mode.p), ("w", w, mode.q)):
        if vec.shape != (size,):
            raise DimensionMismatchError(what, (size,), vec.shape)
    return mode.a @ x + mode.b @ u + mode.c @ w


def measure(
    x: ArrayLike, mode: ModeRealization, v: ArrayLike, x_hat_prev: ArrayLike
) -> np.ndarray:
    """
    Produce a measurement: H x + G v + F x_hat_prev.

    Raises:
        DimensionMismatchError: If any vector does not fit the mode
    """
    x, v, x_hat_prev = (
        np.asarray(arr, dtype=float).reshape(-1) for arr in (x, v, x_hat_prev)
    )
    for what, vec, size in (
        ("x", x, mode.n),
        ("v", v, mode.r),
        ("x_hat_prev", x_hat_prev, mode.n),
    ):
        if vec.shape != (size,):
            raise DimensionMismatchError(what, (size,), vec.shape)
    return mode.h @ x + mode.g @ v + mode.f @ x_hat_prev


def simulate(spec: SystemSpec, horizon: int, seed: int) -> Trajectory:
    """
    Simulate the closed loop of plant, sensor and LMMSE filter.

    The filter supplies x_hat for the feedback terms F_{k+1} x_hat_k and, under
    FeedbackEstimate, u_k = x_hat_k. One joint mode draw is made per time
    index: mode k supplies A, B, C for x_{k+1} and H, G, F for y_k.

    Args:
        spec: System to simulate
        horizon: Number of steps T (0 gives only x_0)
        seed: Random seed

    Returns:
        Trajectory with states, estimates, measurements, modes and noises
    """
    from .lmmse_filter import LmmseFilter, feedback_variant

    rng = np.random.default_rng(seed)
    filter_spec = feedback_variant(spec) if spec.feedback else spec
    estimator = LmmseFilter()

    x = spec.x0_mean + psd_sqrt(spec.p0) @ rng.standard_normal(spec.n)
    dists = [spec.mode_law(0)]
    filter_dists = [filter_spec.mode_law(0)]
    modes = [dists[0].draw(rng)]

    state = estimator.initial_state(
        filter_spec.x0_mean, filter_spec.p0, filter_spec.input_at(0)
    )
    states = [x]
    estimates = [state.x_hat]
    measurements: List[np.ndarray] = []
    noises: List[NoiseDraw] = []

    for k in range(horizon):
        mode_k = dists[k].realizations[modes[k]]
        u_k = spec.input_at(k, state.x_hat)

        dists.append(spec.mode_law(k + 1))
        filter_dists.append(filter_spec.mode_law(k + 1))
        modes.append(dists[k + 1].draw(rng))
        mode_next = dists[k + 1].realizations[modes[k + 1]]

        noise = NoiseDraw.sample(rng, mode_k.q, mode_next.r)
        x = step_state(x, mode_k, u_k, noise.w)
        y = measure(x, mode_next, noise.v, state.x_hat)

        state = estimator.update(
            state,
            y,
            filter_spec.input_at(k),
            filter_spec.input_at(k + 1),
            filter_dists[k],
            filter_dists[k + 1],
        )

        states.append(x)
        estimates.append(state.x_hat)
        measurements.append(y)
        noises.append(noise)

    logger.debug("Simulated %d steps (seed=%d)", horizon, seed)
    return Trajectory(
        states=np.array(states),
        estimates=np.array(estimates),
        measurements=measurements,
        modes=modes,
        noises=noises,
    )
