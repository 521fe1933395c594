"""Entropy and mutual-information estimation from nearest-neighbor graphs.

The package estimates Renyi entropy of order alpha in (0, 1) from i.i.d.
samples via the p-th-power edge lengths of generalized nearest-neighbor
graphs, and Renyi mutual information via the empirical copula transform.
It ships the Monte-Carlo calibration of the graph constant, synthetic data
generators, an independent-subspace-analysis pipeline built on the MI
estimator, a structural diagnostics suite, and a command-line interface.
"""

from ._version import __version__
from .calibration import (
    DEFAULT_N_CAL,
    DEFAULT_REPS,
    GammaCache,
    GammaEstimate,
    GammaKey,
    estimate_gamma,
    gamma_analytic,
)
from .diagnostics import (
    GROWTH_SPREAD_BOUND,
    SURVEYED,
    DiagnosticsSummary,
    check_add_one,
    check_boundary_and_superadditivity,
    check_growth_and_indegree,
    check_perturbation,
    check_smoothness,
    check_subadditivity,
    check_translation_scaling,
    run_diagnostics,
)
from .errors import (
    DataFormatError,
    DegenerateSampleError,
    GammaCacheError,
    HistogramInfeasibleError,
    InsufficientPointsError,
    NNEntropyError,
    OutsideCubeError,
)
from .estimators import (
    DEFAULT_SPEC,
    EstimateReport,
    EstimatorSettings,
    empirical_copula,
    histogram_entropy,
    histogram_mi,
    renyi_entropy,
    renyi_mi,
    resolve_settings,
)
from .experiments import (
    PAPER_SCALE_ISA,
    IsaExperimentConfig,
    IsaExperimentResult,
    RateExperimentConfig,
    RateExperimentResult,
    RateRow,
    mi_truth,
    run_isa_experiment,
    run_rate_experiment,
)
from .graph import NNGraph, build_boundary_graph, build_nn_graph, l_p
from .isa import (
    FastICAResult,
    IsaProblem,
    IsaSolution,
    amari_block_index,
    block_norm_matrix,
    fastica,
    group_components,
    pairwise_mi_matrix,
    run_isa,
    whiten,
)
from .neighbors import BRUTE_FORCE_DIMENSION, knn_all, knn_query
from .points import Cube, NeighborSpec, PointSet, as_neighbor_spec, as_point_set
from .samplers import (
    WIREFRAME_SHAPES,
    Gaussian,
    Product,
    UniformCube,
    Wireframe3D,
    mix,
    random_covariance,
    sample,
    spec_from_json,
    spec_to_json,
    wireframe_polylines,
)
from .theory import (
    gaussian_renyi_entropy,
    gaussian_renyi_mi,
    mi_rate_exponent,
    uniform_entropy,
)

__all__ = [
    "__version__",
    "BRUTE_FORCE_DIMENSION",
    "DEFAULT_N_CAL",
    "DEFAULT_REPS",
    "DEFAULT_SPEC",
    "Cube",
    "DataFormatError",
    "DegenerateSampleError",
    "DiagnosticsSummary",
    "EstimateReport",
    "EstimatorSettings",
    "FastICAResult",
    "GammaCache",
    "GammaCacheError",
    "GammaEstimate",
    "GammaKey",
    "Gaussian",
    "HistogramInfeasibleError",
    "InsufficientPointsError",
    "GROWTH_SPREAD_BOUND",
    "IsaExperimentConfig",
    "IsaExperimentResult",
    "IsaProblem",
    "IsaSolution",
    "NNEntropyError",
    "PAPER_SCALE_ISA",
    "RateExperimentConfig",
    "RateExperimentResult",
    "RateRow",
    "NNGraph",
    "NeighborSpec",
    "OutsideCubeError",
    "PointSet",
    "Product",
    "SURVEYED",
    "UniformCube",
    "WIREFRAME_SHAPES",
    "Wireframe3D",
    "amari_block_index",
    "as_neighbor_spec",
    "as_point_set",
    "block_norm_matrix",
    "build_boundary_graph",
    "build_nn_graph",
    "check_add_one",
    "check_boundary_and_superadditivity",
    "check_growth_and_indegree",
    "check_perturbation",
    "check_smoothness",
    "check_subadditivity",
    "check_translation_scaling",
    "empirical_copula",
    "estimate_gamma",
    "fastica",
    "gamma_analytic",
    "gaussian_renyi_entropy",
    "gaussian_renyi_mi",
    "group_components",
    "histogram_entropy",
    "histogram_mi",
    "knn_all",
    "knn_query",
    "l_p",
    "mi_rate_exponent",
    "mi_truth",
    "mix",
    "pairwise_mi_matrix",
    "random_covariance",
    "renyi_entropy",
    "renyi_mi",
    "resolve_settings",
    "run_diagnostics",
    "run_isa",
    "run_isa_experiment",
    "run_rate_experiment",
    "sample",
    "spec_from_json",
    "spec_to_json",
    "uniform_entropy",
    "whiten",
]
