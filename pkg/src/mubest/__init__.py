"""One-shot parallel black-box optimization by averaging the mu best samples."""

from .analysis import (
    RateFit,
    SummaryStats,
    expected_min_sphere,
    fit_rate,
    sublevel_radius_inner,
    sublevel_radius_outer,
    summarize,
)
from .estimators import (
    EstimatorSpec,
    RankedBatch,
    best_of,
    hull_filtered_mu,
    hull_filtered_mu_self,
    mu_best_average,
    parse_estimator,
    rank,
    select_mu_power_law,
    select_mu_ratio_pow,
)
from .hull import SimplexIterationError, affine_rank, in_hull_interior, lp_max_min_weight
from .objectives import (
    ObjectiveSpec,
    PerturbedQuadratic,
    griewank,
    make_objective,
    make_perturbed_quadratic,
    monotone_wrap,
    perturbed_sphere,
    rastrigin,
    sample_optimum,
    sphere,
)
from .sampling import (
    RngStream,
    SamplerSpec,
    generate_batch,
    hammersley_batch,
    meta_recentering_sigma,
    meta_tune_recentering_sigma,
    parse_sampler,
    quasi_opposite_extend,
    sample_gaussian,
    sample_uniform_ball,
    scrambled_hammersley,
    stream_for_key,
    with_middle_point,
)

__version__ = "0.1.0"
