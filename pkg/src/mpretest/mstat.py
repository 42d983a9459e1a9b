"""M-statistics and the constrained estimators they define.

The two score statistics are

    m1(a, b) = sum_i psi(x_i - a - b c_i)
    m2(a, b) = sum_i c_i psi(x_i - a - b c_i)

Because psi is nondecreasing, b -> m2(0, b) and a -> m1(a, 0) are
nonincreasing, so each constrained estimator is the midpoint of the interval
[sup{t : g(t) > 0}, inf{t : g(t) < 0}] for the corresponding statistic g.
Both interval ends are located by bracket doubling followed by bisection;
the midpoint definition is honored by running the two bisections separately
and averaging.

The solver is written over batches (one regression problem per row) so the
Monte Carlo engine can drive thousands of replications through the exact
same code path that the scalar API uses; the scalar functions are one-row
batches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import Design, make_design
from .errors import NoSignChange
from .score import ScoreFunction, psi, psi_prime

ROOT_TOL = 1e-10
_MAX_DOUBLINGS = 60
_MAX_BISECT = 200


@dataclass(frozen=True)
class Sample:
    """Paired responses and regressor design of equal length."""

    x: np.ndarray
    design: Design

    def __post_init__(self):
        arr = np.array(self.x, dtype=float).ravel()
        if arr.size != self.design.n:
            raise ValueError(
                f"response length {arr.size} does not match design length {self.design.n}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "x", arr)


def make_sample(x, c) -> Sample:
    return Sample(x=np.asarray(x, dtype=float), design=make_design(c))


@dataclass(frozen=True)
class MEstimates:
    """Constrained estimates plus the variance and slope estimators built on them.

    ``s1_sq``, ``s2_sq``, ``s3_sq`` estimate the score variance from the
    beta-constrained residuals, the raw responses, and the theta-constrained
    residuals respectively.  The two ``gamma_hat`` values average psi' over
    the same two residual sets; callers pick the one matching the statistic
    they standardize.
    """

    beta_tilde: float
    theta_tilde: float
    s1_sq: float
    s2_sq: float
    s3_sq: float
    gamma_hat_theta: float
    gamma_hat_beta: float


def m1(score: ScoreFunction, sample: Sample, a: float, b: float) -> float:
    return float(np.sum(psi(score, sample.x - a - b * sample.design.c)))


def m2(score: ScoreFunction, sample: Sample, a: float, b: float) -> float:
    c = sample.design.c
    return float(c @ psi(score, sample.x - a - b * c))


# ---------------------------------------------------------------------------
# interval-root solver (batched; scalar API wraps one-row batches)
# ---------------------------------------------------------------------------


def _bisect_batch(g, lo, hi, side, tol):
    """Bisect each row's bracket toward one end of the zero interval.

    side "sup": keep g(lo) > 0, converge to sup{t : g(t) > 0}.
    side "inf": keep g(hi) < 0, converge to inf{t : g(t) < 0}.
    Rows whose bracket already measures under tol are left untouched, so a
    row's trajectory does not depend on what else sits in the batch.
    """
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(_MAX_BISECT):
        active = (hi - lo) > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if side == "sup":
            go_up = active & (gm > 0.0)
        else:
            go_up = active & ~(gm < 0.0)
        go_dn = active & ~go_up
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_dn, mid, hi)
    return 0.5 * (lo + hi)


def _interval_root_batch(g, center, half_width, tol=ROOT_TOL):
    """Midpoint of the sign-change interval of each row's nonincreasing g.

    ``g`` maps a vector of abscissas (one per row) to the per-row statistic
    values.  Brackets start at center +- half_width and each side doubles
    until its sign is strict.  Returns (roots, failed, lo, hi); failed rows
    never achieved a strict sign change and carry NaN roots.
    """
    center = np.asarray(center, dtype=float)
    half_width = np.maximum(np.asarray(half_width, dtype=float), tol)
    wlo = half_width.copy()
    whi = half_width.copy()
    lo = center - wlo
    hi = center + whi
    glo = g(lo)
    ghi = g(hi)
    for _ in range(_MAX_DOUBLINGS):
        grow_lo = glo <= 0.0
        grow_hi = ghi >= 0.0
        if not (grow_lo.any() or grow_hi.any()):
            break
        if grow_lo.any():
            wlo = np.where(grow_lo, 2.0 * wlo, wlo)
            lo = np.where(grow_lo, center - wlo, lo)
            glo = np.where(grow_lo, g(lo), glo)
        if grow_hi.any():
            whi = np.where(grow_hi, 2.0 * whi, whi)
            hi = np.where(grow_hi, center + whi, hi)
            ghi = np.where(grow_hi, g(hi), ghi)
    # non-finite statistic values (e.g. NaN responses) must fail loudly, not
    # slip through the sign tests
    failed = (glo <= 0.0) | (ghi >= 0.0) | ~np.isfinite(glo) | ~np.isfinite(ghi)
    b_sup = _bisect_batch(g, lo, hi, "sup", tol)
    b_inf = _bisect_batch(g, lo, hi, "inf", tol)
    roots = 0.5 * (b_sup + b_inf)
    roots = np.where(failed, np.nan, roots)
    return roots, failed, lo, hi


def _theta_start(x_rows):
    """Median-based bracket center and half-width for the location solve."""
    med = np.median(x_rows, axis=1)
    mad = np.median(np.abs(x_rows - med[:, None]), axis=1)
    return med, 1.0 + 2.0 * mad


def _beta_start(x_rows, c):
    """Median of per-point slopes x_i / c_i over nonzero c_i, plus a spread."""
    nz = c != 0.0
    ratios = x_rows[:, nz] / c[nz][None, :]
    med = np.median(ratios, axis=1)
    mad = np.median(np.abs(ratios - med[:, None]), axis=1)
    return med, 1.0 + 2.0 * mad


def beta_tilde_batch(score: ScoreFunction, x_rows: np.ndarray, design: Design):
    """Slope estimates constrained to zero intercept, one per row of x_rows."""
    c = design.c

    def g(b):
        return psi(score, x_rows - b[:, None] * c[None, :]) @ c

    center, width = _beta_start(x_rows, c)
    roots, failed, _, _ = _interval_root_batch(g, center, width)
    return roots, failed


def theta_tilde_batch(score: ScoreFunction, x_rows: np.ndarray):
    """Intercept estimates constrained to zero slope, one per row of x_rows."""

    def g(a):
        return psi(score, x_rows - a[:, None]).sum(axis=1)

    center, width = _theta_start(x_rows)
    roots, failed, _, _ = _interval_root_batch(g, center, width)
    return roots, failed


def beta_tilde(score: ScoreFunction, sample: Sample) -> float:
    """Constrained slope estimate: midpoint of the zero interval of b -> m2(0, b)."""
    roots, failed = beta_tilde_batch(score, sample.x[None, :], sample.design)
    if failed[0]:
        center, width = _beta_start(sample.x[None, :], sample.design.c)
        bracket = (
            float(center[0] - width[0] * 2.0**_MAX_DOUBLINGS),
            float(center[0] + width[0] * 2.0**_MAX_DOUBLINGS),
        )
        raise NoSignChange(
            f"m2(0, b) kept one sign over the bracket {bracket}", bracket=bracket
        )
    return float(roots[0])


def theta_tilde(score: ScoreFunction, sample: Sample) -> float:
    """Constrained intercept estimate: midpoint of the zero interval of a -> m1(a, 0)."""
    roots, failed = theta_tilde_batch(score, sample.x[None, :])
    if failed[0]:
        center, width = _theta_start(sample.x[None, :])
        bracket = (
            float(center[0] - width[0] * 2.0**_MAX_DOUBLINGS),
            float(center[0] + width[0] * 2.0**_MAX_DOUBLINGS),
        )
        raise NoSignChange(
            f"m1(a, 0) kept one sign over the bracket {bracket}", bracket=bracket
        )
    return float(roots[0])


def estimate_all(score: ScoreFunction, sample: Sample) -> MEstimates:
    """Both constrained estimates plus every derived variance / slope estimator."""
    x = sample.x
    c = sample.design.c
    bt = beta_tilde(score, sample)
    tt = theta_tilde(score, sample)
    r_beta = x - bt * c
    r_theta = x - tt
    return MEstimates(
        beta_tilde=bt,
        theta_tilde=tt,
        s1_sq=float(np.mean(psi(score, r_beta) ** 2)),
        s2_sq=float(np.mean(psi(score, x) ** 2)),
        s3_sq=float(np.mean(psi(score, r_theta) ** 2)),
        gamma_hat_theta=float(np.mean(psi_prime(score, r_theta))),
        gamma_hat_beta=float(np.mean(psi_prime(score, r_beta))),
    )
