"""Mirror extragradient solvers for variational inequalities and market equilibria."""

from .errors import (
    DegenerateSolution,
    EvaluationError,
    InsufficientData,
    InvalidInput,
    MirrorVIError,
    Unsupported,
)
from .kernels import (
    BOX,
    ENTROPY,
    EUCLIDEAN,
    MEMBERSHIP_TOL,
    SIMPLEX,
    FeasibleSet,
    Kernel,
    box,
    bregman_divergence,
    linear_max,
    mirror_step,
    negative_entropy,
    simplex,
    simplex_projection,
    squared_euclidean,
    unit_box,
)
from .vi import (
    RunTrace,
    SolverConfig,
    VIProblem,
    gap,
    is_epsilon_strong,
    minty_certificate,
    mirror_extragradient_solve,
    mirror_gradient_solve,
    pathwise_modulus,
    rate_slope,
    rotation_operator,
    scalar_nonminty_operator,
)
from .economy import (
    CES,
    COBB_DOUGLAS,
    LEONTIEF,
    Consumer,
    ExchangeEconomy,
    ScarfEconomy,
    bregman_continuity_bound,
    check_homogeneity,
    check_lsd_sample,
    check_walras,
    check_warp_sample,
    check_wgs_sample,
    consumer_demand,
    demand_oracle,
    elasticity_bound_estimate,
    excess_demand,
    scarf_excess_demand,
)
from .tatonnement import (
    EquilibriumCertificate,
    PriceRun,
    auto_step_size,
    equilibrium_certificate,
    mirror_extratatonnement,
    mirror_tatonnement,
    probe_modulus,
    recommended_step_size,
    scale_to_equilibrium,
)
from .gen import (
    CES_COMPLEMENTS,
    CES_SUBSTITUTES,
    GenSpec,
    generate_economy,
    initial_prices,
)

__version__ = "0.1.0"

__all__ = [
    "MirrorVIError", "InvalidInput", "EvaluationError", "Unsupported",
    "InsufficientData", "DegenerateSolution",
    "Kernel", "FeasibleSet", "MEMBERSHIP_TOL", "BOX", "SIMPLEX", "EUCLIDEAN",
    "ENTROPY", "squared_euclidean",
    "negative_entropy", "box", "unit_box", "simplex", "bregman_divergence",
    "mirror_step", "simplex_projection", "linear_max",
    "VIProblem", "SolverConfig", "RunTrace", "mirror_gradient_solve",
    "mirror_extragradient_solve", "gap", "is_epsilon_strong",
    "minty_certificate", "pathwise_modulus", "rate_slope",
    "rotation_operator", "scalar_nonminty_operator",
    "Consumer", "ExchangeEconomy", "ScarfEconomy", "COBB_DOUGLAS", "LEONTIEF",
    "CES", "consumer_demand", "demand_oracle", "excess_demand",
    "scarf_excess_demand", "check_homogeneity", "check_walras",
    "check_wgs_sample", "check_warp_sample", "check_lsd_sample",
    "elasticity_bound_estimate", "bregman_continuity_bound",
    "EquilibriumCertificate", "PriceRun", "mirror_extratatonnement",
    "mirror_tatonnement", "equilibrium_certificate", "scale_to_equilibrium",
    "recommended_step_size", "probe_modulus", "auto_step_size",
    "GenSpec", "generate_economy", "initial_prices", "CES_SUBSTITUTES",
    "CES_COMPLEMENTS",
]
