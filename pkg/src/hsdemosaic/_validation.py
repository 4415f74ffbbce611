"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np
from sklearn.utils import check_array


def check_cube(cube, name="cube", dtype=(np.float64, np.float32, np.longdouble)):
    """Return ``cube`` as a finite ``(height, width, bands)`` float array."""
    cube = check_array(cube, dtype=dtype, ensure_2d=False, allow_nd=True,
                       ensure_min_samples=1, input_name=name)
    if cube.ndim != 3:
        raise ValueError(f"{name} must have shape (height, width, bands), got {cube.shape}")
    if min(cube.shape) < 1:
        raise ValueError(f"{name} has an empty dimension: {cube.shape}")
    return cube


def check_snapshot(snapshot, name="snapshot"):
    """Return ``snapshot`` as a finite ``(height, width)`` float array."""
    snapshot = check_array(snapshot, dtype=(np.float64, np.float32, np.longdouble),
                           ensure_2d=False, allow_nd=True, input_name=name)
    if snapshot.ndim != 2:
        raise ValueError(f"{name} must have shape (height, width), got {snapshot.shape}")
    return snapshot


def check_same_shape(a, b, names=("test", "ref")):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {names[0]} {a.shape} vs {names[1]} {b.shape}")


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_nonnegative(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a non-negative finite number, got {value}")
    return value
