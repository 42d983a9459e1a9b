"""Running the four tests on concrete data.

UT tests a zero intercept with the slope profiled out, RT tests it assuming
a zero slope, PT tests a zero slope with the intercept profiled out, and the
two-stage procedure uses RT when the PT accepts and UT when it rejects.
Critical values are the asymptotic upper-tail normal quantiles; rejection is
strict inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, ZeroVariance
from .gauss import std_normal_quantile
from .mstat import MEstimates, Sample, beta_tilde, estimate_all, m1, m2, theta_tilde
from .score import ScoreFunction, psi

BRANCH_RT = "used_RT"
BRANCH_UT = "used_UT"


@dataclass(frozen=True)
class TestConfig:
    score: ScoreFunction
    alpha1: float = 0.05
    alpha2: float = 0.05
    alpha3: float = 0.05

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "alpha3"):
            a = getattr(self, name)
            if not 0.0 < a < 1.0:
                raise InvalidParams(f"{name} must lie strictly in (0, 1), got {a}")


@dataclass(frozen=True)
class TestOutcome:
    """Raw and standardized statistics, critical values, and both decisions."""

    t_ut: float
    t_rt: float
    t_pt: float
    z_ut: float
    z_rt: float
    z_pt: float
    crit_ut: float
    crit_rt: float
    crit_pt: float
    pt_rejected: bool
    branch: str
    ptt_reject: bool
    estimates: MEstimates


def _standardize(raw: float, scale_sq: float, label: str) -> float:
    if not scale_sq > 0.0:
        raise ZeroVariance(f"{label} variance estimate is zero; cannot standardize")
    return raw / math.sqrt(scale_sq)


def stat_ut(score: ScoreFunction, sample: Sample) -> tuple[float, float]:
    """Unrestricted statistic m1(0, beta_tilde) and its standardized form."""
    d = sample.design
    bt = beta_tilde(score, sample)
    raw = m1(score, sample, 0.0, bt)
    s1_sq = float(np.mean(psi(score, sample.x - bt * d.c) ** 2))
    return raw, _standardize(raw, d.c1_n * s1_sq, "UT")


def stat_rt(score: ScoreFunction, sample: Sample) -> tuple[float, float]:
    """Restricted statistic m1(0, 0) and its standardized form."""
    raw = m1(score, sample, 0.0, 0.0)
    s2_sq = float(np.mean(psi(score, sample.x) ** 2))
    return raw, _standardize(raw, sample.design.n * s2_sq, "RT")


def stat_pt(score: ScoreFunction, sample: Sample) -> tuple[float, float]:
    """Preliminary slope statistic m2(theta_tilde, 0) and its standardized form."""
    d = sample.design
    tt = theta_tilde(score, sample)
    raw = m2(score, sample, tt, 0.0)
    s3_sq = float(np.mean(psi(score, sample.x - tt) ** 2))
    return raw, _standardize(raw, d.c3_n * s3_sq, "PT")


def run_ptt(config: TestConfig, sample: Sample) -> TestOutcome:
    """Compute all three standardized statistics and apply the two-stage rule."""
    score = config.score
    d = sample.design
    est = estimate_all(score, sample)

    t_ut = m1(score, sample, 0.0, est.beta_tilde)
    t_rt = m1(score, sample, 0.0, 0.0)
    t_pt = m2(score, sample, est.theta_tilde, 0.0)

    z_ut = _standardize(t_ut, d.c1_n * est.s1_sq, "UT")
    z_rt = _standardize(t_rt, d.n * est.s2_sq, "RT")
    z_pt = _standardize(t_pt, d.c3_n * est.s3_sq, "PT")

    crit_ut = std_normal_quantile(1.0 - config.alpha1)
    crit_rt = std_normal_quantile(1.0 - config.alpha2)
    crit_pt = std_normal_quantile(1.0 - config.alpha3)

    pt_rejected = z_pt > crit_pt
    if pt_rejected:
        branch = BRANCH_UT
        ptt_reject = z_ut > crit_ut
    else:
        branch = BRANCH_RT
        ptt_reject = z_rt > crit_rt

    return TestOutcome(
        t_ut=t_ut,
        t_rt=t_rt,
        t_pt=t_pt,
        z_ut=z_ut,
        z_rt=z_rt,
        z_pt=z_pt,
        crit_ut=crit_ut,
        crit_rt=crit_rt,
        crit_pt=crit_pt,
        pt_rejected=pt_rejected,
        branch=branch,
        ptt_reject=ptt_reject,
        estimates=est,
    )
