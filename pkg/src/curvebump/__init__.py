"""curvebump: bump hunting via curvature features of kernel density estimates.

Pipeline: estimate a density with a Gaussian KDE (exact derivatives up to
second order), evaluate a curvature functional on a grid, extract its zero
level set as the bump boundary, and optionally attach bootstrap confidence
regions.  Analytic Gaussian-mixture models and Monte-Carlo harnesses verify
consistency and coverage at desk scale.
"""

from .curvature import (
    FUNCTIONALS,
    SIGN_SELECTORS,
    CurvatureFieldSpec,
    eigenvalue_separation,
    eval_functional,
    ordered_eigenvalues,
    ordered_eigenvalues_batch,
)
from .errors import (
    ConfigurationError,
    DataError,
    DegenerateSampleError,
    ResourceLimitError,
)
from .experiments import (
    ExperimentReport,
    boundary_window,
    consistency_bandwidth,
    loglog_slope,
    run_convergence_experiment,
    run_coverage_experiment,
)
from .inference import (
    BootstrapPlan,
    ConfidenceMargin,
    ConfidenceRegionPair,
    SupErrorSample,
    bootstrap_replicate_indices,
    bootstrap_sup_errors,
    confidence_regions,
    empirical_quantile,
    empirical_tvar,
    gaussian_margin_lower_bound,
    margin_eigenvalue,
    margin_gaussian,
    margin_laplacian,
)
from .kde import (
    BandwidthSpec,
    DensityModel,
    KernelDensityModel,
    SampleMatrix,
    normal_scale_bandwidth,
    operator_kernel_matrix,
    operator_tags,
)
from .levelset import (
    DEFAULT_RESOLUTION,
    BoundaryGeometry,
    GridSpec,
    ScalarFieldGrid,
    connected_components,
    default_grid,
    evaluate_field,
    extract_zero_level,
    extract_zero_level_1d,
    extract_zero_level_2d,
    extract_zero_level_3d,
    hausdorff_distance,
)
from .mixtures import (
    GaussianMixtureModel,
    boomerang_mixture,
    density_derivatives,
    mixture_window,
    sample_mixture,
    smoothed_mixture,
    standard_normal_mixture,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthSpec",
    "BootstrapPlan",
    "BoundaryGeometry",
    "ConfidenceMargin",
    "ConfidenceRegionPair",
    "ConfigurationError",
    "CurvatureFieldSpec",
    "DataError",
    "DEFAULT_RESOLUTION",
    "DegenerateSampleError",
    "DensityModel",
    "ExperimentReport",
    "FUNCTIONALS",
    "GaussianMixtureModel",
    "GridSpec",
    "KernelDensityModel",
    "ResourceLimitError",
    "SampleMatrix",
    "ScalarFieldGrid",
    "SIGN_SELECTORS",
    "SupErrorSample",
    "boomerang_mixture",
    "boundary_window",
    "bootstrap_replicate_indices",
    "bootstrap_sup_errors",
    "confidence_regions",
    "connected_components",
    "consistency_bandwidth",
    "default_grid",
    "density_derivatives",
    "eigenvalue_separation",
    "empirical_quantile",
    "empirical_tvar",
    "eval_functional",
    "evaluate_field",
    "extract_zero_level",
    "extract_zero_level_1d",
    "extract_zero_level_2d",
    "extract_zero_level_3d",
    "gaussian_margin_lower_bound",
    "hausdorff_distance",
    "loglog_slope",
    "margin_eigenvalue",
    "margin_gaussian",
    "margin_laplacian",
    "mixture_window",
    "normal_scale_bandwidth",
    "operator_kernel_matrix",
    "operator_tags",
    "ordered_eigenvalues",
    "ordered_eigenvalues_batch",
    "run_convergence_experiment",
    "run_coverage_experiment",
    "sample_mixture",
    "smoothed_mixture",
    "standard_normal_mixture",
]
