"""Parzen / Renyi quadratic entropy estimators, full and quantized.

The information potential of errors ``e`` with kernel width ``sigma`` is

    IP(e) = 1/N^2 * sum_i sum_j G_{sqrt(2) sigma}(e_i - e_j)

and the quadratic entropy is ``-log IP``. The quantized variant replaces the
inner sum by a sum over codewords weighted by their counts, which drops the
cost from O(N^2) to O(N M).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import as_finite_vector, check_count, check_positive
from .exceptions import InvalidParamsError
from .quantizer import quantize

_SQRT_2PI = np.sqrt(2.0 * np.pi)

# rows per block in the O(N^2) sums; bounds memory at ~ _CHUNK * N doubles
_CHUNK = 1024

INIT_RULES = ("best", "lstsq", "zero")


@dataclass(frozen=True)
class CriterionConfig:
    """Settings shared by the entropy-based solvers.

    Parameters
    ----------
    sigma : float
        Kernel bandwidth. The entropy estimators use ``sqrt(2) * sigma``.
    epsilon : float
        Quantization threshold; ``0`` recovers the unquantized estimator.
    max_iters : int
        Hard cap on fixed-point iterations.
    tol : float
        Stop once the 2-norm of the weight increment drops below ``tol``.
        ``0`` always runs ``max_iters`` iterations.
    ridge : float or None
        Regularizer added to singular normal equations. ``None`` uses
        ``1e-10 * trace(V) / d``.
    init : {'best', 'lstsq', 'zero'}
        Starting weights of the fixed-point iteration. ``'best'`` evaluates
        the least-squares solution and the zero vector under the criterion's
        own information potential and starts from the larger one. With
        impulsive noise the least-squares weights can leave every residual
        far outside the kernel width, where the iteration cannot move.
    """

    sigma: float = 0.5
    epsilon: float = 0.4
    max_iters: int = 100
    tol: float = 1e-8
    ridge: Optional[float] = None
    init: str = "best"

    def __post_init__(self):
        check_positive(self.sigma, "sigma")
        check_positive(self.epsilon, "epsilon", strict=False)
        check_count(self.max_iters, "max_iters")
        check_positive(self.tol, "tol", strict=False)
        if self.ridge is not None:
            check_positive(self.ridge, "ridge", strict=False)
        if self.init not in INIT_RULES:
            raise InvalidParamsError(f"init must be one of {INIT_RULES}, got {self.init!r}")


@dataclass(frozen=True)
class EntropyEstimate:
    h2: float
    ip: float
    quantized: bool = False
    codebook_size: Optional[int] = None


def gaussian_kernel(a, b, sigma):
    """Normalized Gaussian kernel ``exp(-(a-b)^2 / 2 sigma^2) / (sqrt(2 pi) sigma)``.

    Broadcasts over array inputs.
    """
    sigma = check_positive(sigma, "sigma")
    diff = np.subtract(a, b)
    return np.exp(-0.5 * (diff / sigma) ** 2) / (_SQRT_2PI * sigma)


def parzen_density(e, samples, sigma):
    """Parzen-window density of ``samples`` evaluated at ``e`` (scalar or array)."""
    samples = as_finite_vector(samples, name="samples")
    e_arr = np.asarray(e, dtype=np.float64)
    dens = gaussian_kernel(e_arr[..., None], samples, sigma).mean(axis=-1)
    return float(dens) if dens.ndim == 0 else dens


def _entropy(ip, quantized, size=None):
    return EntropyEstimate(h2=float(-np.log(ip)), ip=float(ip), quantized=quantized,
                           codebook_size=size)


def kernel_row_sums(errors, centers, weights, width):
    """``s_i = sum_m weights_m G_width(errors_i - centers_m)`` and the
    matching first moment ``t_i = sum_m weights_m G(...) centers_m``.

    Blocks over rows so that ``N x N`` problems stay within memory.
    """
    n = errors.shape[0]
    s = np.empty(n)
    t = np.empty(n)
    norm = 1.0 / (_SQRT_2PI * width)
    inv = 1.0 / (2.0 * width * width)
    wc = weights * centers
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        diff = errors[start:stop, None] - centers[None, :]
        k = np.exp(-inv * diff * diff)
        s[start:stop] = k @ weights
        t[start:stop] = k @ wc
    return s * norm, t * norm


def information_potential(errors, sigma):
    """Full double-sum information potential and quadratic entropy."""
    e = as_finite_vector(errors, name="errors")
    sigma = check_positive(sigma, "sigma")
    s, _ = kernel_row_sums(e, e, np.ones_like(e), np.sqrt(2.0) * sigma)
    return _entropy(s.sum() / e.shape[0] ** 2, quantized=False)


def quantized_information_potential(errors, sigma, epsilon):
    """Quantized information potential.

    Returns
    -------
    estimate : EntropyEstimate
    codebook : Codebook
    """
    e = as_finite_vector(errors, name="errors")
    sigma = check_positive(sigma, "sigma")
    cb = quantize(e, epsilon)
    s, _ = kernel_row_sums(e, cb.codewords, cb.counts.astype(np.float64), np.sqrt(2.0) * sigma)
    return _entropy(s.sum() / e.shape[0] ** 2, quantized=True, size=cb.size), cb


def qip_gradient(design, w, sigma, epsilon, codebook=None):
    """Gradient of the quantized information potential with respect to ``w``.

    ``tau * sum_i sum_m A_m G(e_i - c_m) (e_i - c_m) x_i`` with
    ``tau = 1 / (N^2 (sqrt(2) sigma)^2)``. The codebook is held fixed; pass
    one explicitly to differentiate a frozen objective, otherwise it is
    built from the residuals at ``w``.
    """
    X = design.regressors
    y = design.targets
    w = np.asarray(w, dtype=np.float64)
    e = y - X @ w
    if codebook is None:
        codebook = quantize(e, epsilon)
    width = np.sqrt(2.0) * check_positive(sigma, "sigma")
    s, t = kernel_row_sums(e, codebook.codewords, codebook.counts.astype(np.float64), width)
    n = e.shape[0]
    tau = 1.0 / (n * n * width * width)
    return tau * (X.T @ (s * e - t))


def frozen_qip(design, w, sigma, codebook):
    """Quantized information potential at ``w`` with a fixed codebook."""
    e = design.targets - design.regressors @ np.asarray(w, dtype=np.float64)
    s, _ = kernel_row_sums(e, codebook.codewords, codebook.counts.astype(np.float64),
                           np.sqrt(2.0) * sigma)
    return s.sum() / e.shape[0] ** 2
