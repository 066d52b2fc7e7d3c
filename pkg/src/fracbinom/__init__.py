"""Fractional binomial distributions and their asymptotic verification toolkit."""

from .asymptotics import (
    DeviationReport,
    DeviationRow,
    ModerateScale,
    RateQuery,
    berry_esseen_profile,
    berry_esseen_sup,
    fenchel_legendre,
    lambda_limit,
    ldp_empirical,
    mdp_empirical,
    moment_diff,
    moment_diff_profile,
    nu_distance_profile,
    rate_ldp,
    rate_mdp,
    sup_distance_mu_nu,
)
from .distribution import (
    DistributionTable,
    LatticeTable,
    Params,
    build_distribution,
    build_nu,
    log_normalizing_constant,
)
from .specfun import log_gamma, log_gen_binom, principal_pow, std_normal_cdf
from .transforms import (
    ConditioningWarning,
    QuadratureConfig,
    QuadratureError,
    RootsOfUnity,
    cf_direct,
    cf_explicit,
    gbt_rhs,
    integrate_01,
    log_gbt_rhs,
    log_mgf,
    mgf_direct,
    mgf_explicit,
    roots_of_unity,
    theta_alpha,
    z_correction,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Params",
    "DistributionTable",
    "LatticeTable",
    "build_distribution",
    "build_nu",
    "log_normalizing_constant",
    "log_gamma",
    "log_gen_binom",
    "std_normal_cdf",
    "principal_pow",
    "QuadratureConfig",
    "QuadratureError",
    "ConditioningWarning",
    "RootsOfUnity",
    "roots_of_unity",
    "theta_alpha",
    "integrate_01",
    "gbt_rhs",
    "log_gbt_rhs",
    "z_correction",
    "log_mgf",
    "mgf_direct",
    "mgf_explicit",
    "cf_direct",
    "cf_explicit",
    "RateQuery",
    "ModerateScale",
    "DeviationRow",
    "DeviationReport",
    "rate_ldp",
    "rate_mdp",
    "lambda_limit",
    "fenchel_legendre",
    "ldp_empirical",
    "mdp_empirical",
    "berry_esseen_sup",
    "sup_distance_mu_nu",
    "moment_diff",
    "berry_esseen_profile",
    "nu_distance_profile",
    "moment_diff_profile",
]
