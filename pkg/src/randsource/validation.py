"""Small input-validation helpers used across the public API."""

from __future__ import annotations

import numpy as np

UNIT_TOL = 1e-14


def check_positive(value, name):
    """Return ``value`` as float, raising if it is not strictly positive."""
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_noise_level(delta):
    """Validate a relative noise level, which must lie in [0, 1)."""
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"noise level must lie in [0, 1), got {delta}")
    return delta


def check_unit_vector(vec, name="direction", tol=UNIT_TOL):
    """Return ``vec`` as a read-only (2,) float array of unit Euclidean norm."""
    arr = np.asarray(vec, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"{name} must be a 2-vector, got shape {arr.shape}")
    norm = float(np.hypot(arr[0], arr[1]))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} must have unit norm (|norm - 1| = {abs(norm - 1.0):.3e})")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def check_points(points):
    """Coerce ``points`` to an (n, 2) float64 array of evaluation locations.

    Accepts a single point ``(x1, x2)`` or any array-like with last axis 2.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.shape == (2,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("points contain non-finite values")
    return arr
