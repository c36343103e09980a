"""Time-series containers and lag embeddings for AR / bivariate VAR fits.

Models carry no intercept. The first ``p`` samples of each series serve
only as lags (no zero padding), so an order-``p`` design has ``N - p`` rows.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ._validation import as_finite_vector
from .exceptions import LengthMismatchError, OrderTooLargeError, InvalidParamsError


def _readonly(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A named, uniformly sampled scalar signal.

    Parameters
    ----------
    samples : array_like
        At least two finite values. Stored as a read-only copy.
    name : str
    """

    samples: np.ndarray
    name: str = "x"

    def __post_init__(self):
        arr = as_finite_vector(self.samples, name=f"series {self.name!r}")
        if arr.size < 2:
            raise InvalidParamsError("a time series needs at least 2 samples")
        object.__setattr__(self, "samples", _readonly(arr))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[0]

    def centered(self):
        """Copy with the sample mean removed (substitute for an intercept)."""
        return TimeSeries(self.samples - self.samples.mean(), name=self.name)


@dataclass(frozen=True)
class LaggedDesign:
    """Regressor matrix and targets of one lag-embedded linear model.

    ``order_spec`` lists the lag count per source channel, own channel first.
    """

    regressors: np.ndarray
    targets: np.ndarray
    order_spec: Tuple[int, ...]
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "regressors", _readonly(self.regressors))
        object.__setattr__(self, "targets", _readonly(self.targets))
        if self.regressors.ndim != 2 or self.regressors.shape[0] != self.targets.shape[0]:
            raise LengthMismatchError("regressors and targets disagree on the row count")

    @property
    def rows(self):
        return self.regressors.shape[0]

    @property
    def d(self):
        return self.regressors.shape[1]

    @property
    def max_lag(self):
        return max(self.order_spec)


def _lag_matrix(x, p):
    # row k (time t = p + k, 0-based) -> [x[t-1], ..., x[t-p]]
    n = x.shape[0]
    return np.column_stack([x[p - j:n - j] for j in range(1, p + 1)])


def _as_series(obj, name):
    if isinstance(obj, TimeSeries):
        return obj
    return TimeSeries(obj, name=name)


def build_ar_design(series, p):
    """Order-``p`` autoregressive embedding of ``series``.

    Row ``t - p`` holds ``[x_{t-1}, ..., x_{t-p}]`` with target ``x_t`` for
    ``t = p+1 .. N``.
    """
    series = _as_series(series, "x")
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise InvalidParamsError(f"order must be a positive integer, got {p!r}")
    p = int(p)
    x = series.samples
    rows = x.shape[0] - p
    if rows <= p:
        raise OrderTooLargeError(
            f"AR order {p} leaves {max(rows, 0)} rows for {p} unknowns (N={x.shape[0]})"
        )
    return LaggedDesign(_lag_matrix(x, p), x[p:], order_spec=(p,), names=(series.name,))


def build_var_design(target, driver, p):
    """Bivariate VAR embedding: own lags of ``target`` then lags of ``driver``.

    Columns ``0..p-1`` are ``target_{t-1..t-p}``; columns ``p..2p-1`` are
    ``driver_{t-1..t-p}``. The target value is ``target_t``.
    """
    target = _as_series(target, "y")
    driver = _as_series(driver, "x")
    if target.n != driver.n:
        raise LengthMismatchError(
            f"series lengths differ: {target.n} ({target.name}) vs {driver.n} ({driver.name})"
        )
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise InvalidParamsError(f"order must be a positive integer, got {p!r}")
    p = int(p)
    y = target.samples
    rows = y.shape[0] - p
    if rows < 2 * p:
        raise OrderTooLargeError(
            f"VAR order {p} leaves {max(rows, 0)} rows for {2 * p} unknowns (N={y.shape[0]})"
        )
    regressors = np.hstack([_lag_matrix(y, p), _lag_matrix(driver.samples, p)])
    return LaggedDesign(regressors, y[p:], order_spec=(p, p), names=(target.name, driver.name))


@dataclass(frozen=True)
class LinearModel:
    """Fitted coefficient vector and its training residuals."""

    coefficients: np.ndarray
    residuals: np.ndarray
    criterion: str
    iterations_used: int = 0
    converged: bool = True
    ridge_used: float = 0.0
    history: Optional[Tuple[np.ndarray, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _readonly(self.coefficients))
        object.__setattr__(self, "residuals", _readonly(self.residuals))

    def predict(self, regressors):
        return np.asarray(regressors, dtype=np.float64) @ self.coefficients
