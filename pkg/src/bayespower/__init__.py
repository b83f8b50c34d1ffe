"""Fast power-curve approximation for two-group Bayesian hypothesis tests."""

from .approx import (
    BayesFactorAnalysis,
    CredibleIntervalAnalysis,
    DesignSpec,
    NormalPosterior,
    PosteriorProbAnalysis,
    approx_posterior,
    interval_prob,
    posterior_prob,
)
from .comparisons import GSpec, HSpec, g_eval, g_grad, h_eval, map_interval
from .lowdisc import SobolStream, next_point, sobol_block, sobol_new
from .models import (
    BERNOULLI,
    GAMMA,
    WEIBULL,
    BetaPrior,
    GammaPrior,
    Prior,
    SuffStats,
    fisher_info,
    hybrid_mode,
    laplace_mode,
    recover_suffstats,
    sample_mle,
    simulate_data,
)
from .oracle import OracleReport, conventional_curve, mc_power, variance_study
from .powercurve import (
    PowerCurve,
    bf_threshold,
    ci_power_curve,
    initial_n0,
    power_at,
    power_curve,
    prior_interval_prob,
    solve_point,
)

__version__ = "0.1.0"

__all__ = [
    "BayesFactorAnalysis",
    "CredibleIntervalAnalysis",
    "DesignSpec",
    "NormalPosterior",
    "PosteriorProbAnalysis",
    "approx_posterior",
    "interval_prob",
    "posterior_prob",
    "GSpec",
    "HSpec",
    "g_eval",
    "g_grad",
    "h_eval",
    "map_interval",
    "SobolStream",
    "next_point",
    "sobol_block",
    "sobol_new",
    "BERNOULLI",
    "GAMMA",
    "WEIBULL",
    "BetaPrior",
    "GammaPrior",
    "Prior",
    "SuffStats",
    "fisher_info",
    "hybrid_mode",
    "laplace_mode",
    "recover_suffstats",
    "sample_mle",
    "simulate_data",
    "OracleReport",
    "conventional_curve",
    "mc_power",
    "variance_study",
    "PowerCurve",
    "bf_threshold",
    "ci_power_curve",
    "initial_n0",
    "power_at",
    "power_curve",
    "prior_interval_prob",
    "solve_point",
]
