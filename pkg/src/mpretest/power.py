"""Asymptotic power functions of the three intercept tests.

Under local alternatives (theta, beta) = (lambda1, lambda2) / sqrt(n), each
standardized statistic is asymptotically normal with a mean shift that scales
with gamma / sigma0, so every power below depends on (sigma0, gamma) only
through that ratio.  The two-stage test's power splits into the probability
of accepting the slope pre-test and rejecting with the restricted statistic,
plus the joint upper-orthant probability of rejecting the pre-test and the
unrestricted statistic, whose correlation is -cbar / sqrt(cstar^2 + cbar^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParams, PreconditionError
from .gauss import OrthantQuery, orthant, std_normal_cdf, std_normal_quantile

COLLAPSE_TOL = 1e-10


@dataclass(frozen=True)
class PowerParams:
    """Everything the asymptotic power formulas consume.

    lambda1, lambda2: local intercept / slope alternatives.
    cbar, cstar: limiting regressor mean and centered root-mean-square (cstar > 0).
    sigma0, gamma: score standard deviation and average slope under the error law.
    alpha1, alpha2, alpha3: nominal one-sided sizes of the UT, RT, and PT.
    """

    lambda1: float
    lambda2: float
    cbar: float
    cstar: float
    sigma0: float
    gamma: float
    alpha1: float = 0.05
    alpha2: float = 0.05
    alpha3: float = 0.05

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "cbar"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParams(f"{name} must be finite")
        if not self.cstar > 0.0:
            raise InvalidParams(f"cstar must be positive, got {self.cstar}")
        if not self.sigma0 > 0.0:
            raise InvalidParams(f"sigma0 must be positive, got {self.sigma0}")
        if not self.gamma > 0.0:
            raise InvalidParams(f"gamma must be positive, got {self.gamma}")
        for name in ("alpha1", "alpha2", "alpha3"):
            a = getattr(self, name)
            if not 0.0 < a < 1.0:
                raise InvalidParams(f"{name} must lie strictly in (0, 1), got {a}")


def _tau(alpha: float) -> float:
    return std_normal_quantile(1.0 - alpha)


def _ut_shift(p: PowerParams) -> float:
    ratio = p.cstar * p.cstar / (p.cstar * p.cstar + p.cbar * p.cbar)
    return p.gamma * p.lambda1 * math.sqrt(ratio) / p.sigma0


def _rt_shift(p: PowerParams) -> float:
    return p.gamma * (p.lambda1 + p.lambda2 * p.cbar) / p.sigma0


def _pt_shift(p: PowerParams) -> float:
    return p.gamma * p.lambda2 * p.cstar / p.sigma0


def _rho(p: PowerParams) -> float:
    return -p.cbar / math.sqrt(p.cstar * p.cstar + p.cbar * p.cbar)


def power_ut(p: PowerParams) -> float:
    """Asymptotic power of the unrestricted test; free of lambda2."""
    return 1.0 - std_normal_cdf(_tau(p.alpha1) - _ut_shift(p))


def power_rt(p: PowerParams) -> float:
    """Asymptotic power of the restricted test."""
    return 1.0 - std_normal_cdf(_tau(p.alpha2) - _rt_shift(p))


def power_ptt_components(p: PowerParams) -> tuple[float, float]:
    """The two branches of the two-stage power.

    Returns (acceptance_branch, rejection_branch): pre-test accepts and the
    restricted test rejects; pre-test rejects and the unrestricted test
    rejects.  Their sum is power_ptt.
    """
    q_pt = _tau(p.alpha3) - _pt_shift(p)
    acceptance = std_normal_cdf(q_pt) * (1.0 - std_normal_cdf(_tau(p.alpha2) - _rt_shift(p)))
    rejection = orthant(OrthantQuery(q_pt, _tau(p.alpha1) - _ut_shift(p), _rho(p)))
    return acceptance, rejection


def power_ptt(p: PowerParams) -> float:
    """Asymptotic power of the test-after-pre-test procedure."""
    acceptance, rejection = power_ptt_components(p)
    return min(1.0, acceptance + rejection)


@dataclass(frozen=True)
class OrderingReport:
    """Predicted and observed ordering of the three powers at one parameter point."""

    pi_ut: float
    pi_rt: float
    pi_ptt: float
    all_equal: bool
    rt_above_ptt_expected: bool
    rt_below_ptt_expected: bool
    predicted: tuple[str, ...]
    holds: bool


def compare_region(p: PowerParams) -> OrderingReport:
    """Evaluate the three powers and check the sign-of-cbar ordering rules.

    Requires alpha1 == alpha2.  With lambda2 > 0 and the restricted mean
    shift exceeding the unrestricted one, a positive cbar puts the RT power
    above both others; a negative cbar reverses both inequalities; cbar == 0
    collapses all three powers to the same value.
    """
    if p.alpha1 != p.alpha2:
        raise PreconditionError(
            f"ordering rules need alpha1 == alpha2, got {p.alpha1} != {p.alpha2}"
        )
    pi_ut = power_ut(p)
    pi_rt = power_rt(p)
    pi_ptt = power_ptt(p)

    ratio = p.cstar * p.cstar / (p.cstar * p.cstar + p.cbar * p.cbar)
    rt_mean = p.lambda1 + p.lambda2 * p.cbar
    ut_mean = p.lambda1 * math.sqrt(ratio)

    if p.cbar == 0.0:
        predicted = ("all_equal",)
        holds = (
            abs(pi_ut - pi_rt) < COLLAPSE_TOL and abs(pi_ut - pi_ptt) < COLLAPSE_TOL
        )
        above = below = False
    elif p.cbar > 0.0 and p.lambda2 > 0.0 and rt_mean > ut_mean:
        predicted = ("rt>ptt", "rt>ut")
        holds = pi_rt > pi_ptt and pi_rt > pi_ut
        above, below = True, False
    elif p.cbar < 0.0 and p.lambda2 > 0.0 and rt_mean < ut_mean:
        predicted = ("rt<ptt", "rt<ut")
        holds = pi_rt < pi_ptt and pi_rt < pi_ut
        above, below = False, True
    else:
        predicted = ()
        holds = True
        above = below = False

    return OrderingReport(
        pi_ut=pi_ut,
        pi_rt=pi_rt,
        pi_ptt=pi_ptt,
        all_equal=p.cbar == 0.0,
        rt_above_ptt_expected=above,
        rt_below_ptt_expected=below,
        predicted=predicted,
        holds=holds,
    )
