import math

import numpy as np
import pytest

from mpretest import (
    ErrorDistribution,
    InvalidParams,
    Regressor,
    SimConfig,
    TestConfig,
    empirical_vs_asymptotic,
    huber,
    identity,
    make_sample,
    population_score_moments,
    run_ptt,
    simulate,
)
from mpretest.montecarlo import rep_generator

H = huber()


def _phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _Phi(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _huber_normal_moments(k, s=1.0):
    # closed forms for psi_k under N(0, s^2)
    z = k / s
    sigma_sq = s * s * 2.0 * (_Phi(z) - 0.5 - z * _phi(z)) + 2.0 * k * k * (1.0 - _Phi(z))
    gamma = 2.0 * _Phi(z) - 1.0
    return sigma_sq, gamma


def test_population_moments_huber_normal():
    sigma_sq, gamma = population_score_moments(H, ErrorDistribution())
    exp_sq, exp_g = _huber_normal_moments(1.28)
    assert sigma_sq == pytest.approx(exp_sq, abs=1e-9)
    assert gamma == pytest.approx(exp_g, abs=1e-9)


def test_population_moments_identity_normal():
    sigma_sq, gamma = population_score_moments(identity(), ErrorDistribution())
    assert sigma_sq == pytest.approx(1.0, abs=1e-8)
    assert gamma == 1.0


def test_population_moments_huber_laplace():
    b = 1.4
    k = 1.28
    sigma_sq, gamma = population_score_moments(H, ErrorDistribution("laplace", scale=b))
    # closed forms for psi_k under Laplace(b)
    r = k / b
    middle = b * b * (2.0 - math.exp(-r) * (r * r + 2.0 * r + 2.0))
    tail = k * k * math.exp(-r)
    assert sigma_sq == pytest.approx(middle + tail, abs=1e-9)
    assert gamma == pytest.approx(1.0 - math.exp(-r), abs=1e-9)


def test_population_moments_huber_contaminated():
    eps, s = 0.1, 3.0
    sigma_sq, gamma = population_score_moments(
        H, ErrorDistribution("contaminated_normal", scale=s, eps=eps)
    )
    m1_sq, g1 = _huber_normal_moments(1.28, 1.0)
    m2_sq, g2 = _huber_normal_moments(1.28, s)
    assert sigma_sq == pytest.approx((1 - eps) * m1_sq + eps * m2_sq, abs=1e-9)
    assert gamma == pytest.approx((1 - eps) * g1 + eps * g2, abs=1e-9)


def test_population_moments_huber_student_t_vs_sampling():
    dist = ErrorDistribution("student_t", df=3.0)
    sigma_sq, gamma = population_score_moments(H, dist)
    rng = np.random.default_rng(555)
    draws = dist.sample(rng, 400_000)
    p = np.clip(draws, -1.28, 1.28)
    sq = p * p
    assert abs(sq.mean() - sigma_sq) <= 4.0 * sq.std() / math.sqrt(sq.size)
    ind = (np.abs(draws) <= 1.28).astype(float)
    assert abs(ind.mean() - gamma) <= 4.0 * ind.std() / math.sqrt(ind.size)


def test_rep_streams_deterministic_and_distinct():
    a = rep_generator(5, 3).standard_normal(4)
    b = rep_generator(5, 3).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    c = rep_generator(5, 4).standard_normal(4)
    assert not np.array_equal(a, c)


def test_regressor_builders():
    c = Regressor("zeros_ones").build(6)
    np.testing.assert_array_equal(c, [0, 0, 0, 1, 1, 1])
    c = Regressor("neg1_zeros").build(6)
    np.testing.assert_array_equal(c, [-1, -1, -1, 0, 0, 0])
    c = Regressor("neg1_pos1").build(5)
    np.testing.assert_array_equal(c, [-1, 1, -1, 1, -1])
    c = Regressor("custom", values=(1.0, 2.0, 3.0)).build(3)
    np.testing.assert_array_equal(c, [1, 2, 3])


def test_regressor_validation():
    with pytest.raises(InvalidParams):
        Regressor("checkerboard")
    with pytest.raises(InvalidParams):
        Regressor("custom", values=(1.0,))
    with pytest.raises(InvalidParams):
        Regressor("custom", values=(1.0, 2.0)).build(5)


def test_error_distribution_validation():
    with pytest.raises(InvalidParams):
        ErrorDistribution("cauchy")
    with pytest.raises(InvalidParams):
        ErrorDistribution("laplace", scale=0.0)
    with pytest.raises(InvalidParams):
        ErrorDistribution("student_t", df=-1.0)
    with pytest.raises(InvalidParams):
        ErrorDistribution("contaminated_normal", eps=1.5)


def test_sim_config_validation():
    with pytest.raises(InvalidParams):
        SimConfig(n=5)
    with pytest.raises(InvalidParams):
        SimConfig(reps=0)
    with pytest.raises(InvalidParams):
        SimConfig(seed=-1)


def test_simulate_reproducible():
    cfg = SimConfig(n=60, reps=300, seed=99)
    assert simulate(cfg) == simulate(cfg)


def test_simulate_matches_scalar_reference_exactly():
    cfg = SimConfig(n=200, reps=50, seed=31)
    res = simulate(cfg)
    c = cfg.regressor.build(cfg.n)
    hits = {"ut": 0, "rt": 0, "ptt": 0, "pt": 0}
    for rep in range(cfg.reps):
        rng = rep_generator(cfg.seed, rep)
        x = cfg.theta + cfg.beta * c + cfg.error_dist.sample(rng, cfg.n)
        out = run_ptt(cfg.test_config, make_sample(x, c))
        hits["ut"] += out.z_ut > out.crit_ut
        hits["rt"] += out.z_rt > out.crit_rt
        hits["ptt"] += out.ptt_reject
        hits["pt"] += out.pt_rejected
    assert res.n_reps == cfg.reps and res.n_failed == 0
    assert res.reject_rate_ut == hits["ut"] / cfg.reps
    assert res.reject_rate_rt == hits["rt"] / cfg.reps
    assert res.reject_rate_ptt == hits["ptt"] / cfg.reps
    assert res.pt_reject_rate == hits["pt"] / cfg.reps


def test_split_and_pooled_runs_agree():
    n, m = 80, 1500
    full = simulate(SimConfig(n=n, reps=2 * m, seed=1))
    half_a = simulate(SimConfig(n=n, reps=m, seed=2))
    half_b = simulate(SimConfig(n=n, reps=m, seed=3))
    pooled = 0.5 * (half_a.reject_rate_ptt + half_b.reject_rate_ptt)
    se = math.sqrt(0.05 * 0.95 / m)
    assert abs(pooled - full.reject_rate_ptt) <= 3.0 * se


@pytest.fixture(scope="module")
def null_run():
    return simulate(SimConfig(n=1000, reps=3000, seed=2718))


def test_null_calibration(null_run):
    res = null_run
    bound = 4.0 / math.sqrt(res.n_reps)
    for mean, sd in (
        (res.mean_z_ut, res.sd_z_ut),
        (res.mean_z_rt, res.sd_z_rt),
        (res.mean_z_pt, res.sd_z_pt),
    ):
        assert abs(mean) < bound * sd
        assert abs(sd - 1.0) < 0.05


def test_null_rates_near_nominal(null_run):
    res = null_run
    se = math.sqrt(0.05 * 0.95 / res.n_reps)
    assert abs(res.reject_rate_ut - 0.05) <= 4.0 * se
    assert abs(res.reject_rate_rt - 0.05) <= 4.0 * se
    assert res.n_failed == 0
    for rate, err in (
        (res.reject_rate_ut, res.stderr_ut),
        (res.reject_rate_rt, res.stderr_rt),
        (res.reject_rate_ptt, res.stderr_ptt),
        (res.pt_reject_rate, res.stderr_pt),
    ):
        assert 0.0 <= rate <= 1.0
        assert err == pytest.approx(math.sqrt(rate * (1 - rate) / res.n_reps))


def test_null_correlation_structure(null_run):
    res = null_run
    # zero cbar correlation bound only holds for centered designs; here the
    # design is zeros_ones, so rt-pt is near zero and ut-pt near -0.7071
    assert abs(res.corr_rt_pt) < 0.06
    assert res.corr_ut_pt == pytest.approx(-1.0 / math.sqrt(2.0), abs=0.05)


def test_empirical_matches_asymptotic_null():
    cfg = SimConfig(n=1000, reps=2500, seed=13)
    cmp = empirical_vs_asymptotic(cfg, 0.0, 0.0)
    assert cmp.analytic_ut == pytest.approx(0.05, abs=1e-10)
    assert cmp.analytic_rt == pytest.approx(0.05, abs=1e-10)
    for diff, err in (
        (cmp.diff_ut, cmp.sim.stderr_ut),
        (cmp.diff_rt, cmp.sim.stderr_rt),
        (cmp.diff_ptt, cmp.sim.stderr_ptt),
    ):
        assert abs(diff) <= max(0.02, 3.0 * err)


def test_empirical_matches_asymptotic_at_intercept_alternative():
    cfg = SimConfig(n=1000, reps=2500, seed=14)
    cmp = empirical_vs_asymptotic(cfg, 2.0, 0.0)
    assert abs(cmp.diff_ptt) <= max(0.02, 3.0 * cmp.sim.stderr_ptt)
    assert abs(cmp.diff_ut) <= max(0.02, 3.0 * cmp.sim.stderr_ut)


def test_large_slope_separates_rt_and_ptt():
    cfg = SimConfig(n=1000, reps=1500, seed=15)
    cmp = empirical_vs_asymptotic(cfg, 0.0, 10.0)
    assert cmp.sim.reject_rate_rt > 0.95
    assert abs(cmp.sim.reject_rate_ptt - 0.05) < 0.03
    assert cmp.sim.pt_reject_rate > 0.95


def test_identity_score_config_runs():
    cfg = SimConfig(
        n=100, reps=200, seed=8, test_config=TestConfig(score=identity())
    )
    res = simulate(cfg)
    assert res.n_failed == 0
    assert 0.0 <= res.reject_rate_ptt <= 1.0
