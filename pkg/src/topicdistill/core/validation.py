"""Input validation helpers shared across modules."""
from __future__ import annotations

import numpy as np

from ..errors import ValidationError

UNIT_NORM_TOL = 1e-6


def as_float_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a C-contiguous 2-D float64 array, rejecting non-finite entries."""
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValidationError(f"{name} must be non-empty, got shape {arr.shape}")
    check_finite(arr, name)
    return arr


def as_pair_tensor(values, name: str = "X") -> np.ndarray:
    """Coerce to a (n_pairs, 2, dim) float64 array of embedding pairs."""
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    if arr.ndim != 3 or arr.shape[1] != 2:
        raise ValidationError(
            f"{name} must have shape (n_pairs, 2, dim), got {arr.shape}"
        )
    if arr.shape[0] == 0 or arr.shape[2] == 0:
        raise ValidationError(f"{name} must be non-empty, got shape {arr.shape}")
    check_finite(arr, name)
    return arr


def check_finite(arr: np.ndarray, name: str = "array") -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")


def normalize_rows(matrix) -> np.ndarray:
    """Scale each row to unit Euclidean norm, preserving direction.

    Raises on zero rows, naming the first offending row index.
    """
    arr = as_float_matrix(matrix, "matrix")
    norms = np.linalg.norm(arr, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValidationError(f"row {int(zero[0])} has zero norm and cannot be normalized")
    return arr / norms[:, None]


def check_unit_rows(matrix: np.ndarray, name: str = "vectors", tol: float = UNIT_NORM_TOL) -> None:
    norms = np.linalg.norm(np.asarray(matrix, dtype=np.float64), axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
    if bad.size:
        idx = int(bad[0])
        raise ValidationError(
            f"{name} row {idx} has norm {norms[idx]:.9f}, expected 1 within {tol:g}"
        )
