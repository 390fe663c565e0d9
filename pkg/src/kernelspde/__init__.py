"""Kernel-based collocation for elliptic PDEs and the stochastic heat equation on (0, 1)."""
from .collocation import (
    CollocationSet,
    CollocationSystem,
    Estimator,
    assemble,
    error_probability,
    fill_distance,
    min_norm_interpolant,
    power_function,
    solve_elliptic,
    stochastic_data_fit,
    uniform_collocation,
)
from .integral import Functionals, IntegralKernelEvaluator, QuadratureRule
from .kernels import (
    BrownianBridgeKernel,
    IntegratedBridgeKernel,
    MaternKernel,
    SpectralKernel,
    bridge_spectral,
    covariance_kernel,
)
from .operators import (
    BoundaryOperator,
    DifferentialOperator,
    apply_to_kernel,
    dirichlet,
    identity,
    make_step_operator,
)
from .reference import (
    SpectralHeatSolution,
    exact_mean,
    exact_var,
    relative_rmse,
    spectral_reference_path,
)
from .spde import (
    EnsembleStats,
    NoiseModel,
    PathResult,
    SpdeProblem,
    path_stream,
    precompute_step,
    run_ensemble,
    run_path,
    run_path_multiplicative,
    sample_noise,
    solve_elliptic_spde,
)

__version__ = "0.1.0"
