"""Granger causality analysis with MSE, MEE and quantized-MEE model fitting."""

from .causality import (
    CausalityReport,
    ChannelAnalysis,
    GcaConfig,
    analyze_channels,
    analyze_pair,
    discrimination_index,
    select_order,
)
from .entropy import (
    CriterionConfig,
    EntropyEstimate,
    gaussian_kernel,
    information_potential,
    parzen_density,
    qip_gradient,
    quantized_information_potential,
)
from .estimators import EntropyLinearRegression, GrangerCausality
from .noise import (
    CASE1,
    CASE2,
    CASE3,
    GaussianMixtureParams,
    StableParams,
    SyntheticSpec,
    UniformParams,
    generate_causal_pair,
    generate_regression,
    sample_alpha_stable,
    sample_gaussian_mixture,
)
from .quantizer import Codebook, quantize
from .solvers import benchmark_solver, solve_fixed_point, solve_mse
from .timeseries import LaggedDesign, LinearModel, TimeSeries, build_ar_design, build_var_design

__version__ = "0.1.0"
