"""
LMMSE Linear Algebra Helpers

Symmetric-matrix utilities shared by the filter, the baselines and the simulator.
"""

from typing import Tuple

import numpy as np
from scipy import linalg as sla


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return (M + M^T) / 2."""
    return 0.5 * (m + m.T)


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix (inf for empty input)."""
    if m.size == 0:
        return float("inf")
    return float(sla.eigvalsh(symmetrize(m))[0])


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """
    Square root factor R of a symmetric PSD matrix with R R^T = M.

    Uses the eigendecomposition so that singular matrices (e.g. P0 = 0) are
    accepted. Tiny negative eigenvalues from round-off are clipped to zero.
    """
    w, v = sla.eigh(symmetrize(m))
    return v * np.sqrt(np.clip(w, 0.0, None))


def pinv_symmetric(m: np.ndarray, rcond: float = 1e-12) -> np.ndarray:
    """
    Moore-Penrose pseudo-inverse of a symmetric matrix.

    Eigenvalues with magnitude at or below rcond times the largest magnitude
    are treated as zero.
    """
    if m.size == 0:
        return np.zeros_like(m)
    w, v = sla.eigh(symmetrize(m))
    cutoff = rcond * np.max(np.abs(w))
    large = np.abs(w) > cutoff
    inv_w = np.zeros_like(w)
    inv_w[large] = 1.0 / w[large]
    return (v * inv_w) @ v.T


def right_solve_psd(
    b: np.ndarray, s: np.ndarray, rcond: float = 1e-12
) -> Tuple[np.ndarray, bool]:
    """
    Compute B S^{-1} for symmetric PSD S.

    Args:
        b: k x m matrix
        s: m x m symmetric PSD matrix
        rcond: Relative eigenvalue cutoff for the pseudo-inverse fallback

    Returns:
        Tuple of (B S^{-1}, used_pinv). used_pinv is True when S was not
        positive definite and the pseudo-inverse was used instead.
    """
    if s.shape[0] == 0:
        return np.zeros((b.shape[0], 0)), False
    try:
        factor = sla.cho_factor(s, lower=True, check_finite=False)
        return sla.cho_solve(factor, b.T, check_finite=False).T, False
    except sla.LinAlgError:
        return b @ pinv_symmetric(s, rcond), True
