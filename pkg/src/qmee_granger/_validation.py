"""Small input-checking helpers shared by the estimators and functions."""

import numbers

import numpy as np

from .exceptions import EmptySampleError, InvalidParamsError, NonFiniteError


def as_finite_vector(values, name="values", allow_empty=False):
    """Return ``values`` as a 1-D float64 array, rejecting NaN/Inf."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0 and not allow_empty:
        raise EmptySampleError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return arr


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise InvalidParamsError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise InvalidParamsError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise InvalidParamsError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidParamsError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParamsError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def check_criterion(criterion):
    crit = str(criterion).upper()
    if crit not in ("MSE", "MEE", "QMEE"):
        raise InvalidParamsError(
            f"criterion must be one of 'mse', 'mee', 'qmee'; got {criterion!r}"
        )
    return crit
