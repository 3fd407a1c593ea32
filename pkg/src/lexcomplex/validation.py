"""Input validation helpers shared by the estimator-facing modules."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InputError


def check_feature_matrix(X, *, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one column, all finite."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1:
        raise InputError(f"{name} must contain at least one row")
    if arr.shape[1] < 1:
        raise InputError(f"{name} must contain at least one feature column")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def check_target_vector(y, n_rows: int, *, name: str = "y") -> np.ndarray:
    """Coerce to a 1-D float64 array of length ``n_rows``, all finite."""
    arr = np.asarray(y, dtype=np.float64).ravel()
    if arr.shape[0] != n_rows:
        raise InputError(
            f"{name} has {arr.shape[0]} entries but {n_rows} rows were given"
        )
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def check_equal_length(x: Sequence, y: Sequence, *, names=("x", "y")) -> int:
    if len(x) != len(y):
        raise InputError(
            f"{names[0]} and {names[1]} differ in length: {len(x)} vs {len(y)}"
        )
    return len(x)
