"""Covariance conditioning helpers shared by the uncertainty and
probability modules."""

from __future__ import annotations

import numpy as np

from .errors import CholeskyFailure


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def repair_psd(m: np.ndarray, trace_tol: float = 0.01) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to zero.

    Raises CholeskyFailure when the clip changes the trace by more than
    ``trace_tol`` (relative), i.e. the matrix was not a covariance up to
    numerical noise.
    """
    sym = symmetrize(np.asarray(m, dtype=float))
    vals, vecs = np.linalg.eigh(sym)
    if vals.min() >= 0.0:
        return sym
    clipped = np.clip(vals, 0.0, None)
    trace = float(np.sum(vals))
    change = float(np.sum(clipped - vals))
    if trace > 0.0 and change > trace_tol * trace:
        raise CholeskyFailure(
            f"eigenvalue clip changes trace by {change / trace:.2%} "
            f"(> {trace_tol:.0%}); matrix is not numerically PSD")
    return vecs @ np.diag(clipped) @ vecs.T


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Matrix square root of a PSD matrix via eigendecomposition.

    Works for singular matrices (zero eigenvalues), unlike Cholesky;
    tiny negative eigenvalues from roundoff are clipped first.
    """
    repaired = repair_psd(m)
    vals, vecs = np.linalg.eigh(repaired)
    return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None)))


def sampling_factor(m: np.ndarray) -> np.ndarray:
    """Factor L with L @ L.T = repaired(m), preferring Cholesky, falling
    back to the eigendecomposition root for semidefinite input."""
    repaired = repair_psd(m)
    try:
        return np.linalg.cholesky(repaired)
    except np.linalg.LinAlgError:
        return psd_sqrt(repaired)


def is_symmetric_psd(m: np.ndarray, sym_rtol: float = 1e-12,
                     eig_floor_factor: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=float)
    scale = max(float(np.abs(m).max()), 1e-300)
    if float(np.abs(m - m.T).max()) > sym_rtol * scale:
        return False
    vals = np.linalg.eigvalsh(symmetrize(m))
    return bool(vals.min() >= -eig_floor_factor * max(float(np.trace(m)), 0.0) - 1e-300)
