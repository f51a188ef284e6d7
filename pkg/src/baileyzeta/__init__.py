"""Bailey pairs, Bailey chains, and the q-series limits that recover
Dirichlet L-values scaled by 1/sqrt(pi).

The symbolic layer (`qcore`, `bailey`, `pairdef`) works over exact rationals
and verifies pair relations coefficientwise; the numeric layer (`weights`,
`limits`) evaluates the two-step limit under an explicit precision context
with convergence reporting.  The `baileyzeta` command line exposes both.
"""

from .qcore import (
    BigCombinatorics,
    OrderMismatchError,
    PrecisionContext,
    QSeries,
    SummationPolicy,
    ZeroConstantTermError,
    big_binomial,
    big_factorial,
    pochhammer_in,
    pochhammer_scaling_limit_check,
    q_integer,
    q_pochhammer,
    ulp_distance,
)
from .bailey import (
    BaileyPair,
    BaileyZetaPair,
    CandidateSearch,
    ChainParameters,
    Monomial,
    VerificationReport,
    VerificationStatus,
    alpha_from_beta,
    beta_from_alpha,
    chain_step,
    classical_to_zeta,
    determine_a_param,
    pair_from_alpha,
    unit_pair,
    unit_zeta_pair,
    verify_pair,
    zeta_to_classical,
)
from .weights import (
    ArithmeticWeight,
    GaussianRational,
    PartialLSeries,
    WeightKind,
    evaluate,
    partial_l_series,
    preset,
)
from .extrapolation import ExtrapolationConfig, extrapolate_to_limit, neville_at_zero
from .limits import (
    AlphaFamily,
    BoundDiagnostic,
    ConvergenceReport,
    RegularizationReport,
    a_n,
    a_n_via_inner,
    alpha_zeta,
    beta_n,
    euler_mascheroni_regularized,
    gamma_exponent_model,
    hypothesis_bound_diagnostic,
    inner_limit_exact,
    inner_limit_numeric,
    outer_limit,
    t_n,
)
from .pairdef import PairDefinition, load_pair_definition, loads_pair_definition

__version__ = "0.1.0"
