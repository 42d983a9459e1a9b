"""Finite-sample simulation engine.

Generates datasets x_i = theta + beta c_i + e_i, pushes every replication
through the two-stage test, and aggregates rejection rates, moments, and
cross-correlations of the standardized statistics.  Replication r draws its
errors from a counter-based generator keyed by (seed, r), so results are
independent of chunking and bit-for-bit reproducible; replications are
processed in fixed-size chunks through the same batched solver the scalar
API uses.

Population values of (sigma0, gamma) for a score/error-law pair come from
one-dimensional adaptive quadrature of psi^2 dF and psi' dF, never from
hard-coded constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .design import make_design
from .errors import InvalidParams
from .gauss import std_normal_quantile
from .mstat import beta_tilde_batch, theta_tilde_batch
from .mtest import TestConfig
from .power import PowerParams, power_ptt, power_rt, power_ut
from .score import ScoreFunction, psi

_CHUNK = 512
_QUAD_TOL = 1e-10

ERROR_KINDS = ("standard_normal", "laplace", "student_t", "contaminated_normal")
REGRESSOR_KINDS = ("zeros_ones", "neg1_zeros", "neg1_pos1", "custom")


@dataclass(frozen=True)
class ErrorDistribution:
    """Symmetric error law: its sampler and its density.

    scale is the laplace scale or the contaminated component's standard
    deviation; df the Student-t degrees of freedom; eps the contamination
    fraction.  Only the parameters of the chosen kind matter.
    """

    kind: str = "standard_normal"
    scale: float = 1.0
    df: float = 3.0
    eps: float = 0.1

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise InvalidParams(f"unknown error distribution {self.kind!r}")
        if self.kind in ("laplace", "contaminated_normal") and not self.scale > 0.0:
            raise InvalidParams(f"scale must be positive, got {self.scale}")
        if self.kind == "student_t" and not self.df > 0.0:
            raise InvalidParams(f"degrees of freedom must be positive, got {self.df}")
        if self.kind == "contaminated_normal" and not 0.0 <= self.eps <= 1.0:
            raise InvalidParams(f"contamination fraction must lie in [0, 1], got {self.eps}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "standard_normal":
            return rng.standard_normal(size)
        if self.kind == "laplace":
            return rng.laplace(0.0, self.scale, size)
        if self.kind == "student_t":
            return rng.standard_t(self.df, size)
        # contaminated normal: draw both components so the stream layout is fixed
        z = rng.standard_normal(size)
        contaminate = rng.random(size) < self.eps
        return np.where(contaminate, self.scale * z, z)

    def pdf(self, x: float) -> float:
        if self.kind == "standard_normal":
            return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if self.kind == "laplace":
            return math.exp(-abs(x) / self.scale) / (2.0 * self.scale)
        if self.kind == "student_t":
            v = self.df
            coef = math.gamma((v + 1.0) / 2.0) / (math.sqrt(v * math.pi) * math.gamma(v / 2.0))
            return coef * (1.0 + x * x / v) ** (-(v + 1.0) / 2.0)
        phi = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        xs = x / self.scale
        phi_s = math.exp(-0.5 * xs * xs) / math.sqrt(2.0 * math.pi) / self.scale
        return (1.0 - self.eps) * phi + self.eps * phi_s

    def _density_breaks(self) -> tuple[float, ...]:
        # laplace density has a kink at the origin; split quadrature there
        return (0.0,) if self.kind == "laplace" else ()


@dataclass(frozen=True)
class Regressor:
    """Named regressor sequences plus a custom escape hatch."""

    kind: str = "zeros_ones"
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in REGRESSOR_KINDS:
            raise InvalidParams(f"unknown regressor kind {self.kind!r}")
        if self.kind == "custom" and len(self.values) < 2:
            raise InvalidParams("custom regressor needs at least 2 values")

    def build(self, n: int) -> np.ndarray:
        if self.kind == "custom":
            if len(self.values) != n:
                raise InvalidParams(
                    f"custom regressor has {len(self.values)} values but n={n}"
                )
            return np.asarray(self.values, dtype=float)
        if self.kind == "zeros_ones":
            c = np.zeros(n)
            c[n // 2 :] = 1.0
            return c
        if self.kind == "neg1_zeros":
            c = np.zeros(n)
            c[: n // 2] = -1.0
            return c
        return np.tile([-1.0, 1.0], (n + 1) // 2)[:n]


@dataclass(frozen=True)
class SimConfig:
    n: int = 1000
    reps: int = 1000
    seed: int = 0
    theta: float = 0.0
    beta: float = 0.0
    error_dist: ErrorDistribution = ErrorDistribution()
    regressor: Regressor = Regressor()
    test_config: TestConfig = TestConfig(ScoreFunction("huber"))

    def __post_init__(self):
        if self.n < 10:
            raise InvalidParams(f"n must be at least 10, got {self.n}")
        if self.reps < 1:
            raise InvalidParams(f"reps must be at least 1, got {self.reps}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SimResult:
    """Aggregated rejection rates, their Monte Carlo standard errors, and
    the empirical moments / correlations of the standardized statistics."""

    reject_rate_ut: float
    reject_rate_rt: float
    reject_rate_ptt: float
    pt_reject_rate: float
    stderr_ut: float
    stderr_rt: float
    stderr_ptt: float
    stderr_pt: float
    corr_rt_pt: float
    corr_ut_pt: float
    mean_z_ut: float
    sd_z_ut: float
    mean_z_rt: float
    sd_z_rt: float
    mean_z_pt: float
    sd_z_pt: float
    n_reps: int
    n_failed: int


def rep_generator(seed: int, rep: int) -> np.random.Generator:
    """Counter-based stream for one replication, independent of all others."""
    key = np.array([seed, rep], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@lru_cache(maxsize=None)
def population_score_moments(
    score: ScoreFunction, dist: ErrorDistribution
) -> tuple[float, float]:
    """(sigma0_sq, gamma) for a score under an error law, by adaptive quadrature.

    sigma0_sq integrates psi^2 against the density; gamma integrates psi'
    (for huber that is the density mass of [-k, k]).
    """
    breaks = sorted(set(dist._density_breaks()) | _score_breaks(score))
    edges = [-np.inf, *breaks, np.inf]
    sigma0_sq = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        part, _ = quad(
            lambda u: psi(score, u) ** 2 * dist.pdf(u),
            lo,
            hi,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
        sigma0_sq += part
    if score.kind == "huber":
        gamma, _ = quad(
            dist.pdf, -score.k, score.k, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200
        )
    else:
        gamma = 1.0
    return sigma0_sq, gamma


def _score_breaks(score: ScoreFunction) -> set[float]:
    return {-score.k, score.k} if score.kind == "huber" else set()


def simulate(config: SimConfig) -> SimResult:
    """Run the full replication batch and aggregate.

    Replications whose estimating equations never bracket a sign change, or
    whose variance estimates vanish, are excluded from every rate and moment
    and surface in ``n_failed``; the batch itself never aborts.
    """
    score = config.test_config.score
    c = config.regressor.build(config.n)
    design = make_design(c)
    crit_ut = std_normal_quantile(1.0 - config.test_config.alpha1)
    crit_rt = std_normal_quantile(1.0 - config.test_config.alpha2)
    crit_pt = std_normal_quantile(1.0 - config.test_config.alpha3)

    counts = np.zeros(4, dtype=np.int64)  # ut, rt, ptt, pt rejections
    sums = np.zeros(3)  # z_ut, z_rt, z_pt
    sums_sq = np.zeros(3)
    cross = np.zeros(2)  # z_rt*z_pt, z_ut*z_pt
    n_ok = 0
    n_failed = 0

    for start in range(0, config.reps, _CHUNK):
        stop = min(start + _CHUNK, config.reps)
        rows = stop - start
        x = np.empty((rows, config.n))
        for i, rep in enumerate(range(start, stop)):
            rng = rep_generator(config.seed, rep)
            x[i] = config.theta + config.beta * c + config.error_dist.sample(rng, config.n)

        bt, bt_failed = beta_tilde_batch(score, x, design)
        tt, tt_failed = theta_tilde_batch(score, x)

        p_beta = psi(score, x - bt[:, None] * c[None, :])
        p_raw = psi(score, x)
        p_theta = psi(score, x - tt[:, None])

        t_ut = p_beta.sum(axis=1)
        t_rt = p_raw.sum(axis=1)
        t_pt = p_theta @ c
        s1_sq = np.mean(p_beta * p_beta, axis=1)
        s2_sq = np.mean(p_raw * p_raw, axis=1)
        s3_sq = np.mean(p_theta * p_theta, axis=1)

        ok = ~(bt_failed | tt_failed) & (s1_sq > 0.0) & (s2_sq > 0.0) & (s3_sq > 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            z_ut = t_ut / np.sqrt(design.c1_n * s1_sq)
            z_rt = t_rt / np.sqrt(design.n * s2_sq)
            z_pt = t_pt / np.sqrt(design.c3_n * s3_sq)

        z_ut, z_rt, z_pt = z_ut[ok], z_rt[ok], z_pt[ok]
        pt_rej = z_pt > crit_pt
        ut_rej = z_ut > crit_ut
        rt_rej = z_rt > crit_rt
        ptt_rej = np.where(pt_rej, ut_rej, rt_rej)

        counts += [ut_rej.sum(), rt_rej.sum(), ptt_rej.sum(), pt_rej.sum()]
        sums += [z_ut.sum(), z_rt.sum(), z_pt.sum()]
        sums_sq += [(z_ut * z_ut).sum(), (z_rt * z_rt).sum(), (z_pt * z_pt).sum()]
        cross += [(z_rt * z_pt).sum(), (z_ut * z_pt).sum()]
        n_ok += int(ok.sum())
        n_failed += int(rows - ok.sum())

    if n_ok == 0:
        raise InvalidParams("every replication failed; nothing to aggregate")

    rates = counts / n_ok
    stderrs = np.sqrt(rates * (1.0 - rates) / n_ok)
    means = sums / n_ok
    # sample variance with the usual n-1 correction
    variances = (sums_sq - n_ok * means * means) / max(n_ok - 1, 1)
    sds = np.sqrt(np.maximum(variances, 0.0))

    def _corr(cross_sum, i, j):
        cov = (cross_sum - n_ok * means[i] * means[j]) / max(n_ok - 1, 1)
        denom = sds[i] * sds[j]
        return float(cov / denom) if denom > 0.0 else float("nan")

    return SimResult(
        reject_rate_ut=float(rates[0]),
        reject_rate_rt=float(rates[1]),
        reject_rate_ptt=float(rates[2]),
        pt_reject_rate=float(rates[3]),
        stderr_ut=float(stderrs[0]),
        stderr_rt=float(stderrs[1]),
        stderr_ptt=float(stderrs[2]),
        stderr_pt=float(stderrs[3]),
        corr_rt_pt=_corr(cross[0], 1, 2),
        corr_ut_pt=_corr(cross[1], 0, 2),
        mean_z_ut=float(means[0]),
        sd_z_ut=float(sds[0]),
        mean_z_rt=float(means[1]),
        sd_z_rt=float(sds[1]),
        mean_z_pt=float(means[2]),
        sd_z_pt=float(sds[2]),
        n_reps=n_ok,
        n_failed=n_failed,
    )


@dataclass(frozen=True)
class PowerComparison:
    """Empirical rejection rates next to the asymptotic power values."""

    lambda1: float
    lambda2: float
    sim: SimResult
    analytic_ut: float
    analytic_rt: float
    analytic_ptt: float
    diff_ut: float
    diff_rt: float
    diff_ptt: float


def empirical_vs_asymptotic(
    config: SimConfig, lambda1: float, lambda2: float
) -> PowerComparison:
    """Simulate under local alternatives and compare with the analytic powers.

    The true parameters are set to (lambda1, lambda2) / sqrt(n); the analytic
    side uses population (sigma0, gamma) for the configured score and error
    law, with the finite-n design constants as limit stand-ins.
    """
    rn = math.sqrt(config.n)
    sim_config = replace(config, theta=lambda1 / rn, beta=lambda2 / rn)
    sim = simulate(sim_config)

    design = make_design(config.regressor.build(config.n))
    sigma0_sq, gamma = population_score_moments(
        config.test_config.score, config.error_dist
    )
    params = PowerParams(
        lambda1=lambda1,
        lambda2=lambda2,
        cbar=design.cbar_limit,
        cstar=math.sqrt(design.cstar2_limit),
        sigma0=math.sqrt(sigma0_sq),
        gamma=gamma,
        alpha1=config.test_config.alpha1,
        alpha2=config.test_config.alpha2,
        alpha3=config.test_config.alpha3,
    )
    analytic_ut = power_ut(params)
    analytic_rt = power_rt(params)
    analytic_ptt = power_ptt(params)
    return PowerComparison(
        lambda1=lambda1,
        lambda2=lambda2,
        sim=sim,
        analytic_ut=analytic_ut,
        analytic_rt=analytic_rt,
        analytic_ptt=analytic_ptt,
        diff_ut=sim.reject_rate_ut - analytic_ut,
        diff_rt=sim.reject_rate_rt - analytic_rt,
        diff_ptt=sim.reject_rate_ptt - analytic_ptt,
    )
