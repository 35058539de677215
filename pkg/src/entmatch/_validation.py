"""Input validation helpers shared across the package."""

import numbers

import numpy as np


def check_finite_scalar(value, name="value"):
    """Coerce to float and reject NaN/inf."""
    if not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def check_unit_interval(u, name="u"):
    """Coerce to float in [0, 1]."""
    u = check_finite_scalar(u, name)
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {u}")
    return u


def check_betting_variable(epsilon, name="epsilon"):
    """The betting variable must lie in [-2, 2] for the bet to stay non-negative."""
    epsilon = check_finite_scalar(epsilon, name)
    if abs(epsilon) > 2.0:
        raise ValueError(f"{name} must lie in [-2, 2], got {epsilon}")
    return epsilon


def check_sample_array(X, name="X", min_samples=1):
    """Flatten to a 1-d float array of finite values with at least `min_samples` entries."""
    arr = np.asarray(X, dtype=float).ravel()
    if arr.size < min_samples:
        raise ValueError(f"{name} needs at least {min_samples} samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValueError(f"{name} contains a non-finite value at index {bad}")
    return arr
