"""Robust score-type M-tests for the intercept of a simple regression.

The package tests a zero intercept three ways: unrestricted (slope profiled
out), restricted (slope pinned at the suspected value), and through a
two-stage procedure that pre-tests the slope and picks between the first two.
It ships the closed-form asymptotic power functions of all three tests and a
Monte Carlo engine that verifies the distribution theory at finite n.
"""

from .design import Design, make_design
from .errors import (
    DegenerateDesign,
    DomainError,
    EmptyInput,
    InvalidParams,
    MpretestError,
    NoSignChange,
    PreconditionError,
    ZeroVariance,
)
from .gauss import OrthantQuery, orthant, std_normal_cdf, std_normal_quantile
from .montecarlo import (
    ErrorDistribution,
    PowerComparison,
    Regressor,
    SimConfig,
    SimResult,
    empirical_vs_asymptotic,
    population_score_moments,
    simulate,
)
from .mstat import (
    MEstimates,
    Sample,
    beta_tilde,
    estimate_all,
    m1,
    m2,
    make_sample,
    theta_tilde,
)
from .mtest import TestConfig, TestOutcome, run_ptt, stat_pt, stat_rt, stat_ut
from .power import (
    OrderingReport,
    PowerParams,
    compare_region,
    power_ptt,
    power_ptt_components,
    power_rt,
    power_ut,
)
from .score import ScoreFunction, huber, identity, psi, psi_prime

__version__ = "0.1.0"

__all__ = [
    "Design",
    "make_design",
    "MpretestError",
    "EmptyInput",
    "DegenerateDesign",
    "NoSignChange",
    "ZeroVariance",
    "DomainError",
    "InvalidParams",
    "PreconditionError",
    "OrthantQuery",
    "orthant",
    "std_normal_cdf",
    "std_normal_quantile",
    "ErrorDistribution",
    "Regressor",
    "SimConfig",
    "SimResult",
    "PowerComparison",
    "simulate",
    "empirical_vs_asymptotic",
    "population_score_moments",
    "MEstimates",
    "Sample",
    "make_sample",
    "m1",
    "m2",
    "beta_tilde",
    "theta_tilde",
    "estimate_all",
    "TestConfig",
    "TestOutcome",
    "run_ptt",
    "stat_ut",
    "stat_rt",
    "stat_pt",
    "PowerParams",
    "OrderingReport",
    "power_ut",
    "power_rt",
    "power_ptt",
    "power_ptt_components",
    "compare_region",
    "ScoreFunction",
    "huber",
    "identity",
    "psi",
    "psi_prime",
    "__version__",
]
