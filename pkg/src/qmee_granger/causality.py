"""Pairwise Granger causality under the MSE, MEE or QMEE criterion.

For a pair ``(X, Y)`` four models are fitted:

    AR(X)          restricted model of X       order p1, residuals e11
    AR(Y)          restricted model of Y       order p2, residuals e21
    VAR(X | X, Y)  full model of X             order p3, residuals e12
    VAR(Y | Y, X)  full model of Y             order p4, residuals e22

With MSE the index is ``F_{X->Y} = log(Var(e21) / Var(e22))``. With MEE and
QMEE it is the drop in residual quadratic entropy,
``F_{X->Y} = H2(e21) - H2(e22) = log(IP(e22) / IP(e21))``.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ._validation import check_count, check_criterion
from .entropy import CriterionConfig, information_potential, quantized_information_potential
from .exceptions import (
    BicUndefinedError,
    DegenerateSeriesError,
    GrangerError,
    InvalidParamsError,
    LengthMismatchError,
    OrderTooLargeError,
)
from .solvers import fit_design
from .timeseries import TimeSeries, build_ar_design, build_var_design

logger = logging.getLogger(__name__)

BIC_VARIANTS = ("potential_based", "literal")


@dataclass(frozen=True)
class GcaConfig:
    """Configuration of one causality analysis.

    ``order_rule`` is ``'bic'`` (select each model's order in ``1..p_max``)
    or ``'fixed'`` (use ``order`` for every model). ``common_order`` refits
    all four models at the largest BIC-selected order so the restricted and
    full models are nested.
    """

    criterion: str = "QMEE"
    criterion_config: CriterionConfig = field(default_factory=CriterionConfig)
    p_max: int = 10
    order_rule: str = "bic"
    order: Optional[int] = None
    bic_variant: str = "potential_based"
    common_order: bool = False

    def __post_init__(self):
        object.__setattr__(self, "criterion", check_criterion(self.criterion))
        check_count(self.p_max, "p_max")
        if self.order_rule not in ("bic", "fixed"):
            raise InvalidParamsError(f"order_rule must be 'bic' or 'fixed', got {self.order_rule!r}")
        if self.order_rule == "fixed":
            check_count(self.order, "order")
        if self.bic_variant not in BIC_VARIANTS:
            raise InvalidParamsError(f"bic_variant must be one of {BIC_VARIANTS}")

    @property
    def max_order(self):
        return self.order if self.order_rule == "fixed" else self.p_max

    def as_dict(self):
        cc = self.criterion_config
        return {
            "criterion": self.criterion,
            "sigma": cc.sigma,
            "epsilon": cc.epsilon,
            "max_iters": cc.max_iters,
            "tol": cc.tol,
            "ridge": cc.ridge,
            "init": cc.init,
            "p_max": self.p_max,
            "order_rule": self.order_rule,
            "order": self.order,
            "bic_variant": self.bic_variant,
            "common_order": self.common_order,
        }


@dataclass(frozen=True)
class ModelFit:
    """One fitted restricted or full model plus its residual statistics."""

    label: str
    order: int
    coefficients: np.ndarray
    residuals: np.ndarray
    variance: float
    h2: float
    ip: float
    iterations: int
    converged: bool
    ridge_used: float

    def stats(self):
        return {
            "order": self.order,
            "variance": self.variance,
            "h2": self.h2,
            "ip": self.ip,
            "iterations": self.iterations,
            "converged": self.converged,
            "ridge_used": self.ridge_used,
        }


@dataclass(frozen=True)
class OrderSelection:
    order: int
    scores: Dict[int, float]
    variant: str
    fit: ModelFit
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CausalityReport:
    """Directed causality indexes for one channel pair.

    ``f_xy`` is the index from ``x_name`` to ``y_name``. ``rho`` is
    ``(f_xy - f_yx) / f_xy`` (NaN when ``f_xy == 0``). Entropy-based indexes
    are not clamped; ``f_xy_clamped``/``f_yx_clamped`` give ``max(f, 0)``.
    """

    f_xy: float
    f_yx: float
    rho: float
    orders: Tuple[int, int, int, int]
    residual_stats: Dict[str, dict]
    criterion: str
    x_name: str = "X"
    y_name: str = "Y"
    warnings: Tuple[str, ...] = ()
    models: Dict[str, ModelFit] = field(default_factory=dict, repr=False, compare=False)

    @property
    def f_xy_clamped(self):
        return max(self.f_xy, 0.0)

    @property
    def f_yx_clamped(self):
        return max(self.f_yx, 0.0)


def discrimination_index(f_xy, f_yx):
    """``(f_xy - f_yx) / f_xy``; NaN if ``f_xy`` is zero."""
    if f_xy == 0:
        return math.nan
    return (f_xy - f_yx) / f_xy


def _residual_entropy(residuals, criterion, cfg):
    if criterion == "QMEE":
        est, _ = quantized_information_potential(residuals, cfg.sigma, cfg.epsilon)
    else:
        est = information_potential(residuals, cfg.sigma)
    return est


def _fit_model(label, design, config):
    cfg = config.criterion_config
    model = fit_design(design, config.criterion, cfg)
    e = model.residuals
    variance = float(np.mean(e * e))
    if config.criterion == "MSE":
        h2 = ip = math.nan
    else:
        est = _residual_entropy(e, config.criterion, cfg)
        h2, ip = est.h2, est.ip
    return ModelFit(label, design.max_lag, model.coefficients, e, variance, h2, ip,
                    model.iterations_used, model.converged, model.ridge_used)


def _bic_score(fit, n, order, criterion, variant):
    penalty = order * math.log(n)
    if criterion == "MSE":
        if fit.variance <= 0:
            return -math.inf
        return n * math.log(fit.variance) + penalty
    if variant == "literal":
        if not fit.h2 > 0:
            raise BicUndefinedError(
                f"entropy estimate {fit.h2:.6g} <= 0 at order {order}; log undefined")
        return n * math.log(fit.h2) + penalty
    return n * fit.h2 + penalty


def _design(target, driver, p):
    if driver is None:
        return build_ar_design(target, p)
    return build_var_design(target, driver, p)


def _label(target, driver):
    if driver is None:
        return f"AR({target.name})"
    return f"VAR({target.name}|{target.name},{driver.name})"


def select_order(target, config, driver=None):
    """Choose a model order by BIC over ``1..config.p_max``.

    Fits the AR model of ``target`` (or, with ``driver``, the bivariate VAR
    model) at every candidate order under ``config.criterion`` and returns the
    minimizer of the BIC score. The literal variant falls back to the
    potential-based one, with a warning, when an entropy estimate is not
    positive.

    Returns
    -------
    OrderSelection
    """
    target = target if isinstance(target, TimeSeries) else TimeSeries(target, "x")
    if driver is not None and not isinstance(driver, TimeSeries):
        driver = TimeSeries(driver, "y")
    label = _label(target, driver)
    n = target.n
    fits = {}
    for p in range(1, config.p_max + 1):
        fits[p] = _fit_model(label, _design(target, driver, p), config)

    variant = config.bic_variant
    warnings = []
    try:
        scores = {p: _bic_score(f, n, p, config.criterion, variant) for p, f in fits.items()}
    except BicUndefinedError as exc:
        msg = f"{label}: literal BIC undefined ({exc}); used potential_based"
        logger.warning(msg)
        warnings.append(msg)
        variant = "potential_based"
        scores = {p: _bic_score(f, n, p, config.criterion, variant) for p, f in fits.items()}
    best = min(scores, key=lambda p: (scores[p], p))
    return OrderSelection(best, scores, variant, fits[best], tuple(warnings))


def _check_channel(series):
    if np.ptp(series.samples) == 0:
        raise DegenerateSeriesError(f"channel {series.name!r} is constant")


def _check_pair(x, y, config):
    if x.n != y.n:
        raise LengthMismatchError(f"series lengths differ: {x.n} vs {y.n}")
    p = config.max_order
    if x.n - p <= 2 * p:
        raise OrderTooLargeError(f"N={x.n} too short for order {p} (need N - p > 2p)")
    _check_channel(x)
    _check_channel(y)


def _fit_one(target, driver, config):
    """(fit, warnings) under the configured order rule."""
    if config.order_rule == "fixed":
        label = _label(target, driver)
        return _fit_model(label, _design(target, driver, config.order), config), ()
    sel = select_order(target, config, driver)
    return sel.fit, sel.warnings


def _refit_common(fits, series, config):
    # fits: {key: ModelFit}; series: {key: (target, driver)}
    p = max(f.order for f in fits.values())
    out = {}
    for key, f in fits.items():
        if f.order == p:
            out[key] = f
        else:
            target, driver = series[key]
            out[key] = _fit_model(f.label, _design(target, driver, p), config)
    return out


def _index(restricted, full, criterion):
    if criterion == "MSE":
        return math.log(restricted.variance / full.variance)
    return restricted.h2 - full.h2


def _ridge_warnings(fits):
    return tuple(
        f"{f.label}: rank-deficient design regularized (ridge {f.ridge_used:.3g})"
        for f in fits if f.ridge_used > 0
    )


def _report(x, y, ar_x, ar_y, var_x, var_y, config, warnings):
    crit = config.criterion
    f_xy = _index(ar_y, var_y, crit)
    f_yx = _index(ar_x, var_x, crit)
    fits = {"e11": ar_x, "e21": ar_y, "e12": var_x, "e22": var_y}
    warnings = tuple(warnings) + _ridge_warnings(fits.values())
    return CausalityReport(
        f_xy=f_xy,
        f_yx=f_yx,
        rho=discrimination_index(f_xy, f_yx),
        orders=(ar_x.order, ar_y.order, var_x.order, var_y.order),
        residual_stats={k: dict(label=f.label, **f.stats()) for k, f in fits.items()},
        criterion=crit,
        x_name=x.name,
        y_name=y.name,
        warnings=warnings,
        models=fits,
    )


def analyze_pair(x, y, config=None):
    """Granger causality indexes between two series.

    Parameters
    ----------
    x, y : TimeSeries or array_like
        Equal-length channels.
    config : GcaConfig, optional

    Returns
    -------
    CausalityReport
    """
    config = config or GcaConfig()
    x = x if isinstance(x, TimeSeries) else TimeSeries(x, "X")
    y = y if isinstance(y, TimeSeries) else TimeSeries(y, "Y")
    _check_pair(x, y, config)

    ar_x, w1 = _fit_one(x, None, config)
    ar_y, w2 = _fit_one(y, None, config)
    var_x, w3 = _fit_one(x, y, config)
    var_y, w4 = _fit_one(y, x, config)
    warnings = w1 + w2 + w3 + w4
    if config.common_order and config.order_rule == "bic":
        fits = _refit_common(
            {"ar_x": ar_x, "ar_y": ar_y, "var_x": var_x, "var_y": var_y},
            {"ar_x": (x, None), "ar_y": (y, None), "var_x": (x, y), "var_y": (y, x)},
            config,
        )
        ar_x, ar_y, var_x, var_y = fits["ar_x"], fits["ar_y"], fits["var_x"], fits["var_y"]
    return _report(x, y, ar_x, ar_y, var_x, var_y, config, warnings)


@dataclass
class ChannelAnalysis:
    """Directed index matrix over a set of channels.

    ``matrix[i, j]`` is the index from channel ``i`` to channel ``j``; the
    diagonal and failed pairs are NaN. ``reports`` maps ``(i, j)`` with
    ``i < j`` to the report with ``x = channel i``, ``y = channel j``.
    """

    names: List[str]
    matrix: np.ndarray
    reports: Dict[Tuple[int, int], CausalityReport]
    errors: Dict[Tuple[int, int], str]
    config: GcaConfig

    def pairs(self):
        """Directed entries ``(from, to, f, order, warnings)`` in a stable order.

        For every unordered pair ``i < j`` the ``i -> j`` entry precedes
        ``j -> i``. ``order`` is that of the full model of the receiving
        channel.
        """
        out = []
        for (i, j) in sorted(set(self.reports) | set(self.errors)):
            rep = self.reports.get((i, j))
            if rep is None:
                err = (f"error: {self.errors[(i, j)]}",)
                out.append((self.names[i], self.names[j], math.nan, None, err))
                out.append((self.names[j], self.names[i], math.nan, None, err))
                continue
            out.append((self.names[i], self.names[j], rep.f_xy, rep.orders[3], rep.warnings))
            out.append((self.names[j], self.names[i], rep.f_yx, rep.orders[2], rep.warnings))
        return out


def _pair_job(i, j, ci, cj, ar_i, ar_j, config):
    try:
        _check_pair(ci, cj, config)
        if isinstance(ar_i, Exception):
            raise ar_i
        if isinstance(ar_j, Exception):
            raise ar_j
        (fi, wi), (fj, wj) = ar_i, ar_j
        var_i, w3 = _fit_one(ci, cj, config)
        var_j, w4 = _fit_one(cj, ci, config)
        warnings = wi + wj + w3 + w4
        if np.array_equal(ci.samples, cj.samples):
            warnings += (f"channels {ci.name!r} and {cj.name!r} are identical",)
        if config.common_order and config.order_rule == "bic":
            fits = _refit_common(
                {"ar_x": fi, "ar_y": fj, "var_x": var_i, "var_y": var_j},
                {"ar_x": (ci, None), "ar_y": (cj, None), "var_x": (ci, cj), "var_y": (cj, ci)},
                config,
            )
            fi, fj, var_i, var_j = fits["ar_x"], fits["ar_y"], fits["var_x"], fits["var_y"]
        return (i, j), _report(ci, cj, fi, fj, var_i, var_j, config, warnings)
    except (GrangerError, ArithmeticError, ValueError) as exc:
        return (i, j), exc


def _ar_job(series, config):
    try:
        _check_channel(series)
        return _fit_one(series, None, config)
    except (GrangerError, ArithmeticError, ValueError) as exc:
        return exc


def analyze_channels(channels, config=None, n_jobs=None):
    """Pairwise causality among two or more equal-length channels.

    Each channel's restricted (AR) model is fitted once and shared by all
    pairs it appears in. Pair failures are collected in ``errors`` instead of
    aborting the whole analysis.

    Parameters
    ----------
    channels : sequence of TimeSeries
    config : GcaConfig, optional
    n_jobs : int, optional
        Worker count for joblib; ``None`` runs serially.

    Returns
    -------
    ChannelAnalysis
    """
    config = config or GcaConfig()
    channels = [c if isinstance(c, TimeSeries) else TimeSeries(c, f"ch{k}")
                for k, c in enumerate(channels)]
    if len(channels) < 2:
        raise InvalidParamsError("need at least two channels")
    n = channels[0].n
    if any(c.n != n for c in channels):
        raise LengthMismatchError("channels have different lengths")

    pairs = list(combinations(range(len(channels)), 2))
    if n_jobs in (None, 1):
        ar = [_ar_job(c, config) for c in channels]
        results = [_pair_job(i, j, channels[i], channels[j], ar[i], ar[j], config)
                   for i, j in pairs]
    else:
        from joblib import Parallel, delayed

        ar = Parallel(n_jobs=n_jobs)(delayed(_ar_job)(c, config) for c in channels)
        results = Parallel(n_jobs=n_jobs)(
            delayed(_pair_job)(i, j, channels[i], channels[j], ar[i], ar[j], config)
            for i, j in pairs)

    k = len(channels)
    matrix = np.full((k, k), np.nan)
    reports, errors = {}, {}
    for (i, j), res in results:
        if isinstance(res, Exception):
            errors[(i, j)] = f"{type(res).__name__}: {res}"
            logger.warning("pair (%s, %s) failed: %s", channels[i].name, channels[j].name, res)
            continue
        reports[(i, j)] = res
        matrix[i, j] = res.f_xy
        matrix[j, i] = res.f_yx
    return ChannelAnalysis([c.name for c in channels], matrix, reports, errors, config)
