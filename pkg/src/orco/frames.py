"""Satellite-local frame construction."""

from __future__ import annotations

import numpy as np


def rsw_basis(r: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthonormal RSW basis at a state: radial, along-track, cross-track.

    Returns the 3x3 matrix whose columns are (r-hat, s-hat, w-hat) expressed
    in the inertial frame, i.e. the rotation taking RSW components to
    inertial: x_inertial = B @ x_rsw.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    er = r / np.linalg.norm(r)
    h = np.cross(r, v)
    ew = h / np.linalg.norm(h)
    es = np.cross(ew, er)
    return np.column_stack((er, es, ew))


def rsw_basis6(r: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Block-diagonal 6x6 rotation applying the RSW basis to both the
    position and velocity partitions."""
    b = rsw_basis(r, v)
    out = np.zeros((6, 6))
    out[:3, :3] = b
    out[3:, 3:] = b
    return out
