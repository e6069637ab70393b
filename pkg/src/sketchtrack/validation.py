"""Input validation helpers used across the package.

Small, sklearn-flavored checkers: validate, coerce to float64 arrays, raise
ValueError with a parameter name in the message.
"""

from __future__ import annotations

import numbers

import numpy as np


def check_scalar(value, name: str, *, minimum=None, maximum=None,
                 include_min: bool = True, include_max: bool = True) -> float:
    """Validate a real scalar, optionally against open/closed bounds."""
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ValueError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if minimum is not None:
        if include_min and value < minimum:
            raise ValueError(f"{name} must be >= {minimum}, got {value}")
        if not include_min and value <= minimum:
            raise ValueError(f"{name} must be > {minimum}, got {value}")
    if maximum is not None:
        if include_max and value > maximum:
            raise ValueError(f"{name} must be <= {maximum}, got {value}")
        if not include_max and value >= maximum:
            raise ValueError(f"{name} must be < {maximum}, got {value}")
    return value


def check_positive(value, name: str) -> float:
    return check_scalar(value, name, minimum=0.0, include_min=False)


def check_probability(value, name: str) -> float:
    return check_scalar(value, name, minimum=0.0, maximum=1.0)


def check_points(points, name: str = "points") -> np.ndarray:
    """Coerce to a finite (N, 2) float64 array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.size == 2:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must have shape (N, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def check_vector2(value, name: str) -> np.ndarray:
    """Coerce to a finite length-2 float64 vector."""
    arr = np.asarray(value, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"{name} must have exactly 2 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def check_weight_vector(weights, n_particles: int, name: str = "weights",
                        atol: float = 1e-12) -> np.ndarray:
    """Validate a probability vector over the grid: nonnegative, sums to 1."""
    arr = np.asarray(weights, dtype=float).reshape(-1)
    if arr.shape != (n_particles,):
        raise ValueError(f"{name} must have length {n_particles}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    if np.any(arr < 0.0):
        raise ValueError(f"{name} must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) > atol:
        raise ValueError(f"{name} must sum to 1 within {atol}, got {total!r}")
    return arr


def check_mask(mask, n_particles: int, name: str = "mask") -> np.ndarray:
    """Validate a boolean membership vector aligned with the grid."""
    arr = np.asarray(mask)
    if arr.dtype != bool:
        if not np.all(np.isin(arr, (0, 1))):
            raise ValueError(f"{name} must be boolean or 0/1 valued")
        arr = arr.astype(bool)
    arr = arr.reshape(-1)
    if arr.shape != (n_particles,):
        raise ValueError(f"{name} must have length {n_particles}, got {arr.shape}")
    return arr


def check_likelihood_vector(values, n_particles: int, name: str = "likelihood") -> np.ndarray:
    """Validate a per-particle nonnegative likelihood vector."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (n_particles,):
        raise ValueError(f"{name} must have length {n_particles}, got {arr.shape}")
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(np.isposinf(arr)):
        raise ValueError(f"{name} must be finite and nonnegative")
    return arr
