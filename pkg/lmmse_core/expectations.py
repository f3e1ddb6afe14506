"""
LMMSE Mode Expectations

Exact mode expectations used by each recursion step, by finite enumeration over
a ModeDistribution, plus closed forms for the tracking-in-clutter mode law.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import DimensionMismatchError, WindowError
from .models import ClutterParams
from .system import ModeDistribution

if TYPE_CHECKING:
    from .clutter import Window


@dataclass(frozen=True)
class DynamicsExpectations:
    """E[A], E[B], E[CC^T], E[A S A^T], E[A U B^T], E[B D B^T] at time k."""

    ea: np.ndarray
    eb: np.ndarray
    ecc: np.ndarray
    easa: np.ndarray
    eaub: np.ndarray
    ebdb: np.ndarray


@dataclass(frozen=True)
class MeasurementExpectations:
    """E[H], E[F], E[GG^T], E[H S H^T], E[F L F^T], E[H X F^T] at time k+1."""

    eh: np.ndarray
    ef: np.ndarray
    egg: np.ndarray
    ehsh: np.ndarray
    eflf: np.ndarray
    ehxf: np.ndarray

    @property
    def m(self) -> int:
        return self.eh.shape[0]


@dataclass(frozen=True)
class StepExpectations:
    """Both halves of the expectations needed by one recursion step."""

    dynamics: DynamicsExpectations
    measurement: MeasurementExpectations


def _require_shape(what: str, mat: np.ndarray, shape: tuple) -> None:
    if mat.shape != shape:
        raise DimensionMismatchError(what, shape, mat.shape)


def dynamics_expectations(
    dist: ModeDistribution,
    sigma: np.ndarray,
    upsilon: np.ndarray,
    delta: np.ndarray,
) -> DynamicsExpectations:
    """
    Dynamics-side expectations as exact weighted sums over the atoms.

    Args:
        dist: Mode distribution at time k
        sigma: E[x_k x_k^T]
        upsilon: E[x_k] u_k^T
        delta: u_k u_k^T

    Returns:
        DynamicsExpectations

    Raises:
        DimensionMismatchError: If the moments do not fit the atoms
    """
    n, p, q = dist.n, dist.p, dist.q
    _require_shape("Sigma", sigma, (n, n))
    _require_shape("Upsilon", upsilon, (n, p))
    _require_shape("Delta", delta, (p, p))

    ea = np.zeros((n, n))
    eb = np.zeros((n, p))
    ecc = np.zeros((n, n))
    easa = np.zeros((n, n))
    eaub = np.zeros((n, n))
    ebdb = np.zeros((n, n))
    for w, mode in dist.atoms:
        if mode.dims[:3] != (n, p, q):
            raise DimensionMismatchError("mode atom (n, p, q)", (n, p, q), mode.dims[:3])
        ea += w * mode.a
        eb += w * mode.b
        ecc += w * mode.c @ mode.c.T
        easa += w * mode.a @ sigma @ mode.a.T
        eaub += w * mode.a @ upsilon @ mode.b.T
        ebdb += w * mode.b @ delta @ mode.b.T

    return DynamicsExpectations(ea=ea, eb=eb, ecc=ecc, easa=easa, eaub=eaub, ebdb=ebdb)


def measurement_expectations(
    dist_next: ModeDistribution,
    sigma_next: np.ndarray,
    lam: np.ndarray,
    ea: np.ndarray,
    eb: np.ndarray,
    upsilon: np.ndarray,
) -> MeasurementExpectations:
    """
    Measurement-side expectations as exact weighted sums over the atoms.

    The inner matrix X = E[A] Lambda + E[B] Upsilon^T of E[H X F^T] is held
    fixed across atoms.

    Args:
        dist_next: Mode distribution at time k+1
        sigma_next: E[x_{k+1} x_{k+1}^T]
        lam: Lambda_k
        ea: E[A_k]
        eb: E[B_k]
        upsilon: Upsilon_k

    Returns:
        MeasurementExpectations

    Raises:
        DimensionMismatchError: If the moments do not fit the atoms
    """
    n, m, r = dist_next.n, dist_next.m, dist_next.r
    _require_shape("Sigma_next", sigma_next, (n, n))
    _require_shape("Lambda", lam, (n, n))
    _require_shape("E[A]", ea, (n, n))
    if eb.shape[0] != n or upsilon.shape != (n, eb.shape[1]):
        raise DimensionMismatchError("E[B] / Upsilon", (n, eb.shape[1]), upsilon.shape)

    inner = ea @ lam + eb @ upsilon.T
    eh = np.zeros((m, n))
    ef = np.zeros((m, n))
    egg = np.zeros((m, m))
    ehsh = np.zeros((m, m))
    eflf = np.zeros((m, m))
    ehxf = np.zeros((m, m))
    for w, mode in dist_next.atoms:
        if (mode.n, mode.m, mode.r) != (n, m, r):
            raise DimensionMismatchError("mode atom (n, m, r)", (n, m, r), (mode.n, mode.m, mode.r))
        eh += w * mode.h
        ef += w * mode.f
        egg += w * mode.g @ mode.g.T
        ehsh += w * mode.h @ sigma_next @ mode.h.T
        eflf += w * mode.f @ lam @ mode.f.T
        ehxf += w * mode.h @ inner @ mode.f.T

    return MeasurementExpectations(
        eh=eh, ef=ef, egg=egg, ehsh=ehsh, eflf=eflf, ehxf=ehxf
    )


def step_expectations(
    dist: ModeDistribution,
    dist_next: ModeDistribution,
    sigma: np.ndarray,
    sigma_next: np.ndarray,
    lam: np.ndarray,
    upsilon: np.ndarray,
    delta: np.ndarray,
) -> StepExpectations:
    """Both halves for one step, Sigma_{k+1} supplied by the caller."""
    dyn = dynamics_expectations(dist, sigma, upsilon, delta)
    meas = measurement_expectations(dist_next, sigma_next, lam, dyn.ea, dyn.eb, upsilon)
    return StepExpectations(dynamics=dyn, measurement=meas)


def xi_matrix(n_detections: int) -> np.ndarray:
    """(1/N)((N-2) 1 1^T + I), zero for N = 1."""
    ones = np.ones((n_detections, n_detections))
    return ((n_detections - 2) * ones + np.eye(n_detections)) / n_detections


def clutter_expectations(
    params: ClutterParams,
    n_detections: int,
    a: np.ndarray,
    sigma_next: np.ndarray,
    lam: np.ndarray,
    window: "Window",
    miss_probability: float = 0.0,
) -> MeasurementExpectations:
    """
    Closed-form measurement expectations of the clutter mode law.

    With miss_probability w0 > 0 the law also contains the all-clutter atom
    {H = 0, G = g_cl I, F = 1 (x) H_nom A} with weight w0, and each placement
    atom has weight (1 - w0)/N.

    Args:
        params: Sensor parameters (H_nom, G_nom)
        n_detections: Scan size N
        a: Deterministic state transition
        sigma_next: Sigma_{k+1}
        lam: Lambda_k
        window: Validation window of the scan (gives g_cl)
        miss_probability: Weight of the all-clutter atom

    Returns:
        MeasurementExpectations

    Raises:
        WindowError: If N < 1
    """
    if n_detections < 1:
        raise WindowError(
            f"Clutter expectations need at least one detection, got N={n_detections}",
            suggestions=["Use the predict-only path for empty scans"],
        )
    big_n = n_detections
    w0 = float(miss_probability)
    h = params.h_row
    ha = h @ a
    ones = np.ones((big_n, 1))
    ones_mat = np.ones((big_n, big_n))
    eye = np.eye(big_n)

    placement = (1.0 - w0) / big_n
    clutter_share = (1.0 - w0) * (big_n - 1) / big_n + w0
    hah = (ha @ lam @ ha.T).item()

    eh = placement * np.kron(ones, h)
    ef = clutter_share * np.kron(ones, ha)
    egg = (placement * params.g_nom**2 + clutter_share * window.g_cl**2) * eye
    ehsh = placement * (h @ sigma_next @ h.T).item() * eye
    eflf = ((1.0 - w0) * xi_matrix(big_n) + w0 * ones_mat) * hah
    ehxf = placement * (ones_mat - eye) * hah

    return MeasurementExpectations(
        eh=eh, ef=ef, egg=egg, ehsh=ehsh, eflf=eflf, ehxf=ehxf
    )
