"""uniquant experiments.

This package provides rate-curve experiments, the brute-force optimal
quantizer search and the random empirical baseline.
"""

from uniquant.experiments.baseline import RandomBaseline, random_empirical_error
from uniquant.experiments.oracle import OracleResult, brute_force_optimal_uniform, optimal_uniform_search
from uniquant.experiments.rate_curve import (
    RateCurve,
    RateCurveRow,
    RateExperimentConfig,
    SlopeFit,
    fit_slope,
    run_rate_experiment,
)

__all__ = [
    "OracleResult",
    "RandomBaseline",
    "RateCurve",
    "RateCurveRow",
    "RateExperimentConfig",
    "SlopeFit",
    "brute_force_optimal_uniform",
    "fit_slope",
    "optimal_uniform_search",
    "random_empirical_error",
    "run_rate_experiment",
]
