"""scikit-learn compatible wrappers around the solvers and the GCA engine."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import check_criterion
from .causality import GcaConfig, analyze_channels
from .entropy import CriterionConfig
from .solvers import fit_design
from .timeseries import LaggedDesign, TimeSeries


class EntropyLinearRegression(RegressorMixin, BaseEstimator):
    """Linear regression without intercept fitted under MSE, MEE or QMEE.

    Parameters
    ----------
    criterion : {'qmee', 'mee', 'mse'}, default='qmee'
    sigma : float, default=0.5
        Kernel bandwidth of the error entropy estimator.
    epsilon : float, default=0.4
        Quantization threshold (QMEE only).
    max_iter : int, default=100
    tol : float, default=1e-8
        Stop when the weight increment norm falls below ``tol``.
    ridge : float or None, default=None
        Regularizer for singular normal equations; ``None`` picks
        ``1e-10 * trace / d``.
    init : {'best', 'lstsq', 'zero'}, default='best'
        Fixed-point starting weights; see :class:`CriterionConfig`.
        Ignored when ``coef_init`` is passed to ``fit``.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    n_iter_ : int
    converged_ : bool
    residuals_ : ndarray of shape (n_samples,)
        Training residuals.

    Examples
    --------
    >>> import numpy as np
    >>> X = np.random.default_rng(0).uniform(-2, 2, (200, 2))
    >>> reg = EntropyLinearRegression(criterion="qmee").fit(X, X @ [2.0, 1.0])
    >>> np.round(reg.coef_, 6)
    array([2., 1.])
    """

    def __init__(self, criterion="qmee", sigma=0.5, epsilon=0.4, max_iter=100, tol=1e-8,
                 ridge=None, init="best"):
        self.criterion = criterion
        self.sigma = sigma
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.tol = tol
        self.ridge = ridge
        self.init = init

    def _config(self):
        return CriterionConfig(sigma=self.sigma, epsilon=self.epsilon, max_iters=self.max_iter,
                               tol=self.tol, ridge=self.ridge, init=self.init)

    def fit(self, X, y, coef_init=None):
        X, y = validate_data(self, X, y, dtype=np.float64, y_numeric=True,
                             ensure_min_samples=2)
        crit = check_criterion(self.criterion)
        design = LaggedDesign(X, y, order_spec=(X.shape[1],))
        if crit == "MSE":
            model = fit_design(design, crit, self._config())
        else:
            from .solvers import solve_fixed_point

            model = solve_fixed_point(design, self._config(), crit, w_init=coef_init)
        self.coef_ = np.array(model.coefficients)
        self.residuals_ = np.array(model.residuals)
        # closed-form MSE counts as a single iteration
        self.n_iter_ = max(model.iterations_used, 1)
        self.converged_ = model.converged
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return X @ self.coef_


class GrangerCausality(BaseEstimator):
    """Pairwise Granger causality among the columns of ``X``.

    ``fit`` takes an ``(n_samples, n_channels)`` array, one channel per
    column, and stores the directed index matrix: ``causality_[i, j]`` is
    the index from channel ``i`` to channel ``j``.

    Parameters
    ----------
    criterion : {'qmee', 'mee', 'mse'}, default='qmee'
    sigma, epsilon, max_iter, tol, ridge, init
        See :class:`EntropyLinearRegression`.
    p_max : int, default=10
        Largest candidate order for BIC selection.
    order : int or None, default=None
        Fix every model order instead of running BIC.
    bic_variant : {'potential_based', 'literal'}
    common_order : bool, default=False
    center : bool, default=False
        Remove each channel's mean before embedding.
    channel_names : list of str, optional
    n_jobs : int, optional
    """

    def __init__(self, criterion="qmee", sigma=0.5, epsilon=0.4, max_iter=100, tol=1e-8,
                 ridge=None, init="best", p_max=10, order=None, bic_variant="potential_based",
                 common_order=False, center=False, channel_names=None, n_jobs=None):
        self.criterion = criterion
        self.sigma = sigma
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.tol = tol
        self.ridge = ridge
        self.init = init
        self.p_max = p_max
        self.order = order
        self.bic_variant = bic_variant
        self.common_order = common_order
        self.center = center
        self.channel_names = channel_names
        self.n_jobs = n_jobs

    def gca_config(self):
        cc = CriterionConfig(sigma=self.sigma, epsilon=self.epsilon, max_iters=self.max_iter,
                             tol=self.tol, ridge=self.ridge, init=self.init)
        return GcaConfig(
            criterion=self.criterion,
            criterion_config=cc,
            p_max=self.p_max,
            order_rule="bic" if self.order is None else "fixed",
            order=self.order,
            bic_variant=self.bic_variant,
            common_order=self.common_order,
        )

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_features=2,
                          ensure_min_samples=3)
        names = self.channel_names or [f"ch{k}" for k in range(X.shape[1])]
        if len(names) != X.shape[1]:
            raise ValueError(f"{len(names)} channel names for {X.shape[1]} columns")
        channels = [TimeSeries(X[:, k], name=str(names[k])) for k in range(X.shape[1])]
        if self.center:
            channels = [c.centered() for c in channels]
        self.analysis_ = analyze_channels(channels, self.gca_config(), n_jobs=self.n_jobs)
        self.causality_ = self.analysis_.matrix
        self.channel_names_ = list(names)
        return self
