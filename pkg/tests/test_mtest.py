import math

import numpy as np
import pytest

from mpretest import (
    InvalidParams,
    TestConfig,
    ZeroVariance,
    beta_tilde,
    huber,
    identity,
    m1,
    m2,
    make_sample,
    run_ptt,
    stat_pt,
    stat_rt,
    stat_ut,
    std_normal_quantile,
    theta_tilde,
)
from mpretest.montecarlo import rep_generator

H = huber()
IDENT = identity()


def _noisy_sample(seed, n=400, theta=0.0, beta=0.0):
    rng = rep_generator(seed, 0)
    c = np.tile([0.0, 1.0], n // 2)
    x = theta + beta * c + rng.standard_normal(n)
    return make_sample(x, c)


def test_stat_ut_raw_vanishes_on_exact_fit():
    c = np.linspace(-1.0, 1.0, 50)
    s = make_sample(2.0 * c, c)
    raw = m1(H, s, 0.0, beta_tilde(H, s))
    assert abs(raw) <= 50 * 1e-9
    with pytest.raises(ZeroVariance):
        stat_ut(H, s)


def test_stat_ut_identity_matches_least_squares_algebra():
    rng = np.random.default_rng(42)
    x = rng.normal(0.5, 1.0, size=120)
    c = rng.normal(1.0, 1.0, size=120)
    _, z = stat_ut(IDENT, make_sample(x, c))
    # classical statistic with the slope profiled out, assembled independently
    n = len(x)
    b0 = float(c @ x / (c @ c))
    r = x - b0 * c
    c1 = n - c.sum() ** 2 / float(c @ c)
    z_oracle = r.sum() / math.sqrt(c1 * float(r @ r) / n)
    assert z == pytest.approx(z_oracle, abs=1e-8)


def test_stat_rt_identity_algebra():
    rng = np.random.default_rng(43)
    x = rng.normal(size=60)
    c = rng.normal(size=60)
    raw, z = stat_rt(IDENT, make_sample(x, c))
    assert raw == pytest.approx(float(x.sum()), rel=1e-12)
    assert z == pytest.approx(float(x.sum()) / math.sqrt(float(x @ x)), rel=1e-12)


def test_stat_rt_zero_data():
    s = make_sample(np.zeros(10), np.tile([0.0, 1.0], 5))
    assert m1(H, s, 0.0, 0.0) == 0.0
    with pytest.raises(ZeroVariance):
        stat_rt(H, s)


def test_stat_pt_raw_vanishes_for_constant_response():
    s = make_sample(np.full(20, 4.0), np.tile([0.0, 1.0], 10))
    tt = theta_tilde(H, s)
    assert abs(m2(H, s, tt, 0.0)) <= 20 * 1e-9
    with pytest.raises(ZeroVariance):
        stat_pt(H, s)


def test_stat_pt_identity_centered_cross_product():
    rng = np.random.default_rng(44)
    x = rng.normal(size=80)
    c = np.tile([-1.0, 1.0], 40)
    raw, _ = stat_pt(IDENT, make_sample(x, c))
    assert raw == pytest.approx(float(c @ (x - x.mean())), abs=1e-8)


def test_run_ptt_decision_coherence():
    s = _noisy_sample(seed=5, theta=0.4)
    cfg = TestConfig(score=H, alpha1=0.07, alpha2=0.04, alpha3=0.2)
    out = run_ptt(cfg, s)
    # recompute the two-stage indicator from the pieces
    expected = (
        out.z_pt <= out.crit_pt and out.z_rt > out.crit_rt
    ) or (out.z_pt > out.crit_pt and out.z_ut > out.crit_ut)
    assert out.ptt_reject == expected
    assert out.pt_rejected == (out.z_pt > out.crit_pt)
    assert (out.branch == "used_UT") == out.pt_rejected
    np.testing.assert_allclose(
        [out.crit_ut, out.crit_rt, out.crit_pt],
        [std_normal_quantile(1 - a) for a in (0.07, 0.04, 0.2)],
    )


def test_run_ptt_matches_standalone_stats():
    s = _noisy_sample(seed=6, theta=0.2, beta=0.1)
    out = run_ptt(TestConfig(score=H), s)
    assert (out.t_ut, out.z_ut) == stat_ut(H, s)
    assert (out.t_rt, out.z_rt) == stat_rt(H, s)
    assert (out.t_pt, out.z_pt) == stat_pt(H, s)


def test_run_ptt_deterministic():
    s = _noisy_sample(seed=7)
    cfg = TestConfig(score=H)
    assert run_ptt(cfg, s) == run_ptt(cfg, s)


def test_rejections_are_upper_tail_only():
    s = _noisy_sample(seed=8, theta=-8.0)
    out = run_ptt(TestConfig(score=H), s)
    assert not out.ptt_reject
    assert out.z_rt < 0.0


def test_distant_alternative_always_rejects():
    c = np.tile([0.0, 1.0], 500)
    cfg = TestConfig(score=H)
    rejected = 0
    for rep in range(30):
        rng = rep_generator(123, rep)
        x = 5.0 + rng.standard_normal(1000)
        if run_ptt(cfg, make_sample(x, c)).ptt_reject:
            rejected += 1
    assert rejected == 30


def test_alpha3_extremes_force_branch():
    s = _noisy_sample(seed=9)
    out = run_ptt(TestConfig(score=H, alpha3=1 - 1e-9), s)
    assert out.branch == "used_UT"
    out = run_ptt(TestConfig(score=H, alpha3=1e-9), s)
    assert out.branch == "used_RT"


def test_config_validates_alphas():
    with pytest.raises(InvalidParams):
        TestConfig(score=H, alpha1=0.0)
    with pytest.raises(InvalidParams):
        TestConfig(score=H, alpha3=1.0)
