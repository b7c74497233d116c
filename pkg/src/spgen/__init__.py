"""Seeded generators for spatial randomness: Gaussian random fields (dense,
FFT-based, Markov), spatial point processes, fractional Brownian motions,
sheets and fields, and jump processes, plus a statistical validation toolkit
and a command-line front end.
"""

from .circulant import (
    EmbeddingPlan,
    TorusPlan,
    benchmark_scaling,
    plan_embedding,
    plan_torus,
    sample_embedded,
    sample_torus,
    separable_exponential,
)
from .dense import (
    DENSE_SIZE_LIMIT,
    MvnSpec,
    cholesky_lower,
    moving_average_field,
    sample_mvn_cov,
    sample_mvn_prec,
)
from .errors import (
    EmbeddingInfeasibleError,
    FactorizationError,
    GenerationCapError,
    IntensityBoundError,
    InvalidMeasureError,
    InvalidParameterError,
    SpgenError,
    SupercriticalBranchingError,
)
from .fractional import (
    plan_fbf,
    plan_fgn,
    plan_fgn_sheet,
    sample_fbf,
    sample_fbm,
    sample_fgn,
    sample_fractional_wiener_sheet,
    sample_wiener_path,
)
from .gmrf import LatticeGmrfSpec, build_lattice_precision, sample_gmrf
from .grid import (
    Field,
    Grid2D,
    MaskedField,
    TorusExp,
    Wavy,
    eval_cov,
    read_grid_binary,
    read_masked_grid_binary,
    torus_distance,
    write_grid_binary,
    write_masked_grid_binary,
)
from .levy import (
    LevyPath,
    LevyPathSpec,
    gamma_levy_measure,
    gamma_path_spec,
    gamma_sheet_spec,
    refine_path,
    sample_gamma_process_direct,
    sample_gamma_sheet,
    sample_levy_path,
)
from .mcmc import (
    StraussParams,
    numpairs,
    run_conditional_strauss,
    run_rj_strauss,
)
from .pointproc import (
    PointPattern,
    UNIT_SQUARE,
    Window,
    read_points_csv,
    sample_cox,
    sample_hawkes,
    sample_marked_poisson,
    sample_neyman_scott,
    sample_poisson_inversion,
    sample_poisson_thinning,
    sample_shot_noise_cox,
    write_points_csv,
)
from .rng import RngStream
from .validate import (
    MomentReport,
    batch_means,
    dispersion_test,
    empirical_cov_at_lag,
    make_report,
    pair_probability_oracle,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
