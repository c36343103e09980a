"""Coefficient solvers for lag-embedded linear models.

``solve_mse`` is ordinary least squares. ``solve_fixed_point`` maximizes the
(quantized) information potential of the residuals by iterating
``w_k = V(w_{k-1})^{-1} U(w_{k-1})`` with

    U = sum_i sum_m A_m G(e_i - c_m) (y_i - c_m) x_i
    V = sum_i sum_m A_m G(e_i - c_m) x_i x_i^T

where the codebook ``(c, A)`` is rebuilt from the current residuals on
every iteration. For MEE the codebook is the residual vector itself.
"""

import time

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ._kernels import weighted_kernel_sums as _compiled_sums
from ._validation import check_criterion
from .entropy import (
    CriterionConfig,
    information_potential,
    kernel_row_sums,
    quantized_information_potential,
)
from .exceptions import DivergedError, OrderTooLargeError, SingularDesignError
from .quantizer import quantize
from .timeseries import LinearModel

# condition number above which a normal-equation solve counts as failed
_MAX_COND = 1e12


def _solve_normal(A, b, ridge=None):
    """Solve the symmetric PSD system ``A w = b``.

    Uses a Cholesky factorization; a failed factorization or a pivot ratio
    implying a condition number above ``_MAX_COND`` triggers one retry with
    ``ridge * I`` added (default ``1e-10 * trace(A) / d``).
    """
    d = A.shape[0]
    try:
        factor = cho_factor(A, lower=True, check_finite=False)
        piv = np.abs(np.diag(factor[0]))
        if piv.min() ** 2 * _MAX_COND > piv.max() ** 2:
            w = cho_solve(factor, b, check_finite=False)
            if np.all(np.isfinite(w)):
                return w, 0.0
    except LinAlgError:
        pass
    lam = ridge if ridge is not None else 1e-10 * np.trace(A) / d
    if not lam > 0 or not np.isfinite(lam):
        raise SingularDesignError("normal equations are singular and no positive ridge applies")
    try:
        w = np.linalg.solve(A + lam * np.eye(d), b)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"normal equations singular even with ridge {lam:g}") from exc
    if not np.all(np.isfinite(w)):
        raise SingularDesignError(f"normal equations singular even with ridge {lam:g}")
    return w, float(lam)


def solve_mse(design, ridge=None):
    """Least-squares coefficients via the normal equations."""
    X, y = design.regressors, design.targets
    if design.rows < design.d:
        raise OrderTooLargeError(f"{design.rows} rows cannot determine {design.d} coefficients")
    w, lam = _solve_normal(X.T @ X, X.T @ y, ridge)
    return LinearModel(w, y - X @ w, criterion="MSE", iterations_used=0, converged=True,
                       ridge_used=lam)


def fixed_point_terms(design, w, sigma, epsilon, criterion="QMEE", compiled=True):
    """``(U, V)`` of the fixed-point map evaluated at ``w``.

    ``compiled=False`` forces the numpy reference path.
    """
    X, y = design.regressors, design.targets
    e = y - X @ w
    width = np.sqrt(2.0) * sigma
    if compiled and _compiled_sums is not None:
        s, t = _compiled_sums(e, width, float(epsilon), criterion == "QMEE")
    else:
        if criterion == "MEE":
            centers, weights = e, np.ones_like(e)
        else:
            cb = quantize(e, epsilon)
            centers, weights = cb.codewords, cb.counts.astype(np.float64)
        s, t = kernel_row_sums(e, centers, weights, width)
    U = X.T @ (s * y - t)
    V = (X * s[:, None]).T @ X
    return U, V


def _objective(errors, config, criterion):
    if criterion == "MEE":
        return information_potential(errors, config.sigma).ip
    return quantized_information_potential(errors, config.sigma, config.epsilon)[0].ip


def _initial_weights(design, config, criterion):
    zero = np.zeros(design.d)
    if config.init == "zero":
        return zero
    w_ls = solve_mse(design, config.ridge).coefficients.copy()
    if config.init == "lstsq":
        return w_ls
    X, y = design.regressors, design.targets
    if _objective(y, config, criterion) > _objective(y - X @ w_ls, config, criterion):
        return zero
    return w_ls


def solve_fixed_point(design, config=None, criterion="QMEE", w_init=None, record_history=False):
    """Fixed-point MEE / QMEE solver.

    Parameters
    ----------
    design : LaggedDesign
    config : CriterionConfig, optional
    criterion : {'MEE', 'QMEE'}
        MEE uses every residual as a kernel center; QMEE quantizes the
        residuals with ``config.epsilon`` first.
    w_init : array_like, optional
        Starting weights. When omitted, ``config.init`` picks them.
    record_history : bool
        Keep every iterate in ``LinearModel.history``.

    Returns
    -------
    LinearModel
    """
    config = config or CriterionConfig()
    criterion = check_criterion(criterion)
    if criterion == "MSE":
        raise ValueError("solve_fixed_point handles MEE and QMEE; use solve_mse for MSE")
    if design.rows <= design.d:
        raise OrderTooLargeError(f"{design.rows} rows for {design.d} coefficients")
    X, y = design.regressors, design.targets

    if w_init is None:
        w = _initial_weights(design, config, criterion)
    else:
        w = np.array(w_init, dtype=np.float64)
        if w.shape != (design.d,):
            raise ValueError(f"w_init must have shape ({design.d},), got {w.shape}")

    history = [w.copy()] if record_history else None
    converged = False
    ridge_used = 0.0
    it = 0
    for it in range(1, config.max_iters + 1):
        U, V = fixed_point_terms(design, w, config.sigma, config.epsilon, criterion)
        w_new, lam = _solve_normal(V, U, config.ridge)
        ridge_used = max(ridge_used, lam)
        if not np.all(np.isfinite(w_new)):
            raise DivergedError(f"weights became non-finite at iteration {it}")
        step = np.linalg.norm(w_new - w)
        w = w_new
        if record_history:
            history.append(w.copy())
        if step < config.tol or step == 0.0:
            converged = True
            break

    return LinearModel(w, y - X @ w, criterion=criterion, iterations_used=it,
                       converged=converged, ridge_used=ridge_used,
                       history=tuple(history) if record_history else None)


def fit_design(design, criterion, config=None):
    """Fit ``design`` under ``criterion`` (``'MSE'``, ``'MEE'`` or ``'QMEE'``)."""
    criterion = check_criterion(criterion)
    config = config or CriterionConfig()
    if criterion == "MSE":
        return solve_mse(design, config.ridge)
    return solve_fixed_point(design, config, criterion)


def benchmark_solver(criterion, n_grid, config=None, repeats=3, seed=0, noise=None):
    """Mean wall-clock seconds of one solve per sample size.

    Data follow the two-weight regression benchmark (``w* = [2, 1]``) with
    Case 1 mixture noise unless ``noise`` is given. Every solve runs exactly
    ``config.max_iters`` iterations from the least-squares start (``tol`` is
    forced to zero) so that criteria are compared at equal iteration counts.

    Returns
    -------
    list of dict
        One ``{'criterion', 'n', 'seconds', 'repeats'}`` row per grid point.
    """
    from dataclasses import replace

    from .noise import CASE1, SyntheticSpec, generate_regression
    from .timeseries import LaggedDesign

    criterion = check_criterion(criterion)
    config = replace(config or CriterionConfig(max_iters=10), tol=0.0, init="lstsq")
    grid = [int(n) for n in n_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("n_grid must be ascending")
    noise = CASE1 if noise is None else noise

    rows = []
    for n in grid:
        inputs, targets = generate_regression(
            SyntheticSpec("regression", noise, n, seed=seed, true_weights=(2.0, 1.0)))
        design = LaggedDesign(inputs, targets, order_spec=(1, 1))
        fit_design(design, criterion, config)  # warm-up
        elapsed = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fit_design(design, criterion, config)
            elapsed.append(time.perf_counter() - t0)
        rows.append({"criterion": criterion, "n": n, "seconds": float(np.mean(elapsed)),
                     "repeats": repeats})
    return rows
