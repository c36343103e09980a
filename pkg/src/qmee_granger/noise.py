"""Noise samplers and synthetic data generators.

All samplers take an integer seed rather than a generator object so that
concurrent replicas never share RNG state. Monte-Carlo run ``k`` uses
``base_seed + k``.

Stable variates use the Chambers-Mallows-Stuck transform in the
1-parameterization ``S(alpha, beta, gamma, delta; 1)``. For ``beta = 0`` the
0- and 1-parameterizations coincide; users passing ``beta != 0`` get the
1-parameterization convention.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ._validation import check_count
from .exceptions import InvalidParamsError, InvalidSpecError
from .timeseries import TimeSeries


@dataclass(frozen=True)
class GaussianMixtureParams:
    """Mixture of Gaussians given as ``(weight, mean, std)`` triples."""

    components: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        comps = tuple(tuple(float(v) for v in c) for c in self.components)
        if not comps or any(len(c) != 3 for c in comps):
            raise InvalidParamsError("components must be non-empty (weight, mean, std) triples")
        weights = np.array([c[0] for c in comps])
        stds = np.array([c[2] for c in comps])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidParamsError(f"mixture weights must be >= 0 and sum to 1, got {weights}")
        if not np.all(np.isfinite([v for c in comps for v in c])) or np.any(stds <= 0):
            raise InvalidParamsError("mixture means/stds must be finite and stds > 0")
        object.__setattr__(self, "components", comps)

    @property
    def mean(self):
        return sum(w * m for w, m, _ in self.components)

    @property
    def variance(self):
        second = sum(w * (s * s + m * m) for w, m, s in self.components)
        return second - self.mean ** 2


@dataclass(frozen=True)
class StableParams:
    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.delta)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidParamsError(f"stable parameters must be finite, got {vals}")
        if not 0.0 < self.alpha <= 2.0:
            raise InvalidParamsError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise InvalidParamsError(f"beta must lie in [-1, 1], got {self.beta}")
        if self.gamma <= 0:
            raise InvalidParamsError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class UniformParams:
    low: float = -2.0
    high: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.low) and np.isfinite(self.high)) or self.high <= self.low:
            raise InvalidParamsError(f"need finite low < high, got [{self.low}, {self.high}]")


NoiseParams = Union[GaussianMixtureParams, StableParams, UniformParams]

CASE1 = GaussianMixtureParams(((0.5, 4.0, 1.0), (0.5, -4.0, 1.0)))
CASE2 = GaussianMixtureParams(((0.6, 3.0, 1.0), (0.4, -5.0, 1.0)))
CASE3 = StableParams(1.3, 0.0, 0.4, 0.0)
NOISE_CASES = {"case1": CASE1, "case2": CASE2, "case3": CASE3}


def noise_case(name):
    """Look up ``'case1'``/``'1'`` style names."""
    key = str(name).lower()
    if not key.startswith("case"):
        key = "case" + key
    try:
        return NOISE_CASES[key]
    except KeyError:
        raise InvalidParamsError(f"unknown noise case {name!r}; expected one of 1, 2, 3") from None


def _mixture_draws(params, n, rng):
    comps = params.components
    weights = np.array([c[0] for c in comps])
    means = np.array([c[1] for c in comps])
    stds = np.array([c[2] for c in comps])
    labels = rng.choice(len(comps), size=n, p=weights)
    return means[labels] + stds[labels] * rng.standard_normal(n)


def _stable_draws(params, n, rng):
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    v = rng.uniform(-np.pi / 2, np.pi / 2, size=n)
    w = rng.standard_exponential(n)
    if a == 1.0:
        half_pi = np.pi / 2
        bv = half_pi + b * v
        x = (bv * np.tan(v) - b * np.log(half_pi * w * np.cos(v) / bv)) / half_pi
        return g * x + (2 / np.pi) * b * g * np.log(g) + d
    zeta = b * np.tan(np.pi * a / 2)
    shift = np.arctan(zeta) / a
    scale = (1 + zeta * zeta) ** (1 / (2 * a))
    x = (
        scale
        * np.sin(a * (v + shift))
        / np.cos(v) ** (1 / a)
        * (np.cos(v - a * (v + shift)) / w) ** ((1 - a) / a)
    )
    return g * x + d


def _draw(params, n, rng):
    if params is None:
        return np.zeros(n)
    if isinstance(params, GaussianMixtureParams):
        return _mixture_draws(params, n, rng)
    if isinstance(params, StableParams):
        return _stable_draws(params, n, rng)
    if isinstance(params, UniformParams):
        return rng.uniform(params.low, params.high, size=n)
    raise InvalidParamsError(f"unsupported noise parameters: {params!r}")


def sample_gaussian_mixture(params, n, seed):
    """Draw ``n`` i.i.d. values from a Gaussian mixture."""
    if not isinstance(params, GaussianMixtureParams):
        raise InvalidParamsError("params must be GaussianMixtureParams")
    n = check_count(n, "n", minimum=0)
    return _mixture_draws(params, n, np.random.default_rng(seed))


def sample_alpha_stable(params, n, seed):
    """Draw ``n`` i.i.d. stable variates (Chambers-Mallows-Stuck)."""
    if not isinstance(params, StableParams):
        raise InvalidParamsError("params must be StableParams")
    n = check_count(n, "n", minimum=0)
    return _stable_draws(params, n, np.random.default_rng(seed))


def sample_noise(params, n, seed):
    """Dispatch on the parameter type; ``None`` means no noise."""
    n = check_count(n, "n", minimum=0)
    return _draw(params, n, np.random.default_rng(seed))


@dataclass(frozen=True)
class SyntheticSpec:
    """What to generate: ``'regression'`` (linear model) or ``'causal_pair'``."""

    kind: str
    noise: Optional[NoiseParams]
    n: int
    seed: int = 0
    true_weights: Optional[Sequence[float]] = None
    input_range: Tuple[float, float] = (-2.0, 2.0)

    def __post_init__(self):
        if self.kind not in ("regression", "causal_pair"):
            raise InvalidSpecError(f"kind must be 'regression' or 'causal_pair', got {self.kind!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidSpecError(f"n must be a positive integer, got {self.n!r}")
        if self.kind == "regression":
            if self.true_weights is None or len(self.true_weights) != 2:
                raise InvalidSpecError("regression spec needs true_weights of length 2")
            object.__setattr__(self, "true_weights", tuple(float(w) for w in self.true_weights))


def _streams(seed):
    inputs_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(inputs_ss), np.random.default_rng(noise_ss)


def generate_regression(spec):
    """Inputs uniform on ``[-2, 2]^2`` and targets ``inputs @ w* + noise``.

    Returns
    -------
    inputs : ndarray of shape (n, 2)
    targets : ndarray of shape (n,)
    """
    if not isinstance(spec, SyntheticSpec) or spec.kind != "regression":
        raise InvalidSpecError("generate_regression needs a SyntheticSpec of kind 'regression'")
    in_rng, noise_rng = _streams(spec.seed)
    low, high = spec.input_range
    inputs = in_rng.uniform(low, high, size=(spec.n, 2))
    targets = inputs @ np.asarray(spec.true_weights) + _draw(spec.noise, spec.n, noise_rng)
    return inputs, targets


def generate_causal_pair(spec):
    """X drives Y with a one-step delay: ``y_t = x_{t-1} + psi_t``, ``x_0 = 0``."""
    if not isinstance(spec, SyntheticSpec) or spec.kind != "causal_pair":
        raise InvalidSpecError("generate_causal_pair needs a SyntheticSpec of kind 'causal_pair'")
    in_rng, noise_rng = _streams(spec.seed)
    low, high = spec.input_range
    x = in_rng.uniform(low, high, size=spec.n)
    x_prev = np.concatenate(([0.0], x[:-1]))
    y = x_prev + _draw(spec.noise, spec.n, noise_rng)
    return TimeSeries(x, name="X"), TimeSeries(y, name="Y")
