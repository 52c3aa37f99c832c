"""Gini mean difference of correlated random vectors.

Four routes to the same quantity, each cross-validating the others:
closed forms for the multivariate normal and Student-t families, the
conditional-CDF quadrature route, the quantile integral for i.i.d.
variables, and seeded Monte Carlo.  Plus the classical mean/variance/
correlation upper bounds.
"""

from .bounds import (
    BoundReport,
    build_bound_report,
    cp_bound,
    cp_constant,
    cp_grid_minimum,
    exchangeable_rho_bound,
    second_moment_bound,
    second_moment_pair_bound,
)
from .closed_form import (
    QuantileFunction,
    exchangeable_normal_gmd,
    exchangeable_student_gmd,
    gini_index,
    gini_index_from_skew_mean,
    normal_gmd,
    normal_pair_gmd,
    quantile_gmd,
    student_gmd,
    student_pair_gmd,
)
from .errors import (
    DegeneratePairError,
    DomainError,
    GmdError,
    MomentExistenceError,
    NonconvergenceError,
    ValidationError,
)
from .general_ec import (
    SkewingFunction,
    gmd_exchangeable_skew,
    gmd_quadrature,
    h_density,
    max_pdf,
    min_pdf,
    mu_H,
    reliability,
    reliability_quadrature,
    skewing_normal,
    skewing_student,
)
from .model import (
    DistributionSpec,
    Family,
    GmdMethod,
    GmdResult,
    PairDerived,
    PairParams,
    ValidatedSpec,
    pair_derived,
    pair_params,
    spec_from_dict,
    spec_from_json,
    spec_to_dict,
    validate,
)
from .monte_carlo import (
    GmdEstimate,
    MonteCarloConfig,
    classic_empirical_gmd,
    empirical_gmd,
    estimate_gmd,
    sample_mvn,
    sample_mvt,
)
from .quadrature import QuadratureConfig, QuadratureResult
from .special import (
    DegreesOfFreedom,
    gamma_fn,
    lp_norm_std_normal,
    std_normal_cdf,
    std_normal_pdf,
    student_t_cdf,
    student_t_pdf,
)

__version__ = "0.1.0"
