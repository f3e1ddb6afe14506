"""
LMMSE Baselines

Reference trackers for the clutter benchmark: the standard Kalman filter,
the nearest-neighbor (NN) filter and the parametric probabilistic data
association (PDA) filter.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg as sla
from scipy.stats import norm

from .clutter import Scan
from .exceptions import WindowError
from .linalg import symmetrize
from .models import ClutterParams

Matrix = Union[float, np.ndarray]


@dataclass(frozen=True)
class KfState:
    """Kalman estimate and error covariance."""

    x_hat: np.ndarray
    p: np.ndarray


@dataclass(frozen=True)
class PdaStep:
    """Result of a PDA update with its association probabilities."""

    state: KfState
    beta: np.ndarray
    beta0: float


def _mat(value: Matrix) -> np.ndarray:
    return np.atleast_2d(np.asarray(value, dtype=float))


def kf_predict(state: KfState, a: Matrix, c: Matrix) -> KfState:
    """x^- = A x, P^- = A P A^T + C C^T."""
    a, c = _mat(a), _mat(c)
    return KfState(x_hat=a @ state.x_hat, p=symmetrize(a @ state.p @ a.T + c @ c.T))


def innovation_variance(p_pred: np.ndarray, h: Matrix, g: Matrix) -> np.ndarray:
    """S = H P^- H^T + G G^T."""
    h, g = _mat(h), _mat(g)
    return symmetrize(h @ p_pred @ h.T + g @ g.T)


def _kalman_gain(p_pred: np.ndarray, h: np.ndarray, s: np.ndarray) -> np.ndarray:
    try:
        factor = sla.cho_factor(s, lower=True)
    except sla.LinAlgError:
        raise WindowError(
            "Innovation variance is not positive",
            suggestions=["Check that G G^T + H P H^T is positive definite"],
        )
    return sla.cho_solve(factor, h @ p_pred).T


def _correct(
    pred: KfState, y: np.ndarray, h: np.ndarray, g: np.ndarray
) -> KfState:
    s = innovation_variance(pred.p, h, g)
    gain = _kalman_gain(pred.p, h, s)
    x_hat = pred.x_hat + gain @ (y - h @ pred.x_hat)
    p = pred.p - gain @ s @ gain.T
    return KfState(x_hat=x_hat, p=symmetrize(p))


def kf_step(
    state: KfState,
    y: Optional[Union[float, np.ndarray]],
    a: Matrix,
    c: Matrix,
    h: Matrix,
    g: Matrix,
) -> KfState:
    """
    Predict and, when y is given, update with gain P^- H^T S^{-1}.

    Args:
        state: Current estimate
        y: Measurement (None for predict only)
        a: State transition
        c: Process-noise shaping
        h: Observation matrix
        g: Measurement-noise shaping

    Raises:
        WindowError: If the innovation variance is not positive
    """
    pred = kf_predict(state, a, c)
    if y is None:
        return pred
    return _correct(pred, np.atleast_1d(np.asarray(y, dtype=float)), _mat(h), _mat(g))


def nn_step(
    state: KfState, scan: Scan, a: Matrix, c: Matrix, h: Matrix, g: Matrix
) -> KfState:
    """
    Kalman update with the scan value nearest the predicted measurement.

    Ties go to the lowest index; an empty scan gives the prediction.
    """
    if scan.n == 0:
        return kf_predict(state, a, c)
    pred = kf_predict(state, a, c)
    y_pred = float((_mat(h) @ pred.x_hat)[0])
    nearest = int(np.argmin((scan.values - y_pred) ** 2))
    return _correct(pred, scan.values[nearest : nearest + 1], _mat(h), _mat(g))


def pda_association(
    innovations: np.ndarray, s: float, params: ClutterParams
) -> Tuple[np.ndarray, float]:
    """
    Parametric PDA association probabilities.

    beta_i is proportional to the normal density N(nu_i; 0, S) and beta_0 to
    b = lambda (1 - P_D P_G) / P_D.

    Returns:
        Tuple of (beta, beta0)
    """
    likelihood = norm.pdf(innovations, scale=np.sqrt(s))
    b = params.clutter_rate * (1.0 - params.p_d * params.p_g) / params.p_d
    total = b + float(np.sum(likelihood))
    if total <= 0:
        # no clutter, certain detection, all likelihoods underflowed
        return np.full(innovations.size, 1.0 / innovations.size), 0.0
    return likelihood / total, b / total


def pda_step(
    state: KfState,
    scan: Scan,
    a: Matrix,
    c: Matrix,
    h: Matrix,
    g: Matrix,
    params: ClutterParams,
) -> PdaStep:
    """
    PDA update with the probability-weighted combined innovation.

    P = beta0 P^- + (1 - beta0) P_c + W (sum beta_i nu_i nu_i^T - nu nu^T) W^T
    where P_c is the single-measurement updated covariance.
    """
    pred = kf_predict(state, a, c)
    if scan.n == 0:
        return PdaStep(state=pred, beta=np.zeros(0), beta0=1.0)

    h, g = _mat(h), _mat(g)
    s_mat = innovation_variance(pred.p, h, g)
    gain = _kalman_gain(pred.p, h, s_mat)
    s = float(s_mat[0, 0])

    innovations = scan.values - float((h @ pred.x_hat)[0])
    beta, beta0 = pda_association(innovations, s, params)
    combined = float(beta @ innovations)
    spread = float(beta @ innovations**2) - combined**2

    x_hat = pred.x_hat + gain[:, 0] * combined
    p_corrected = pred.p - gain @ s_mat @ gain.T
    p = beta0 * pred.p + (1.0 - beta0) * p_corrected + spread * gain @ gain.T
    return PdaStep(state=KfState(x_hat=x_hat, p=symmetrize(p)), beta=beta, beta0=beta0)
