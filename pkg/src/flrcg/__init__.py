"""Kernel conjugate gradient for functional linear regression with early stopping."""

from .grids import (
    CosineBasis,
    FunctionOnGrid,
    Grid,
    basis_evaluate,
    coefs_to_grid,
    grid_to_coefs,
    l2_inner,
    make_uniform_grid,
    quad_integrate,
)
from .simulate import (
    Dataset,
    RngSpec,
    SpectralModel,
    build_model,
    fourth_moment_ratio,
    load_dataset,
    sample_X,
    sample_dataset,
    save_dataset,
    slope_from_source,
)
from .gram import (
    BrownianKernel,
    ConstantKernel,
    GaussianKernel,
    SpectralKernel,
    empirical_lambda_eigs,
    gram_grid,
    gram_spectral,
    kernel_matrix,
    psd_check,
    t_half_apply,
)
from .solver import (
    FitResult,
    FixedIterations,
    IterationBudget,
    TheoremSchedule,
    Threshold,
    cg_fit,
    omega_threshold,
    oracle_fit,
    predict_beta,
    residual_hnorm,
)
from .analysis import (
    RateConfig,
    RateResult,
    effective_dimension,
    fit_loglog_slope,
    hs_distance_covariance,
    l2_error,
    run_rate_experiment,
    tikhonov_fit,
)
from .estimator import FunctionalCGRegressor
from .exceptions import ConfigError, NumericalError

__version__ = "0.1.0"
