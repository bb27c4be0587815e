import numpy as np
import pytest

from stakepower.errors import StakePowerError
from stakepower.experiments import (
    Mode,
    Ratio,
    SweepConfig,
    default_quota_grid,
    fixed_quota_distribution,
    ratio_statistics,
    run_sweep,
    single_agent_simulation,
)
from stakepower.verification import EXAMPLE_PROFILES


def test_default_grid():
    q = default_quota_grid()
    assert q.size == 101 and q[0] == 0 and q[-1] == 1 and q[50] == 0.5
    with pytest.raises(StakePowerError):
        default_quota_grid(1)


def test_config_validation_and_injection():
    with pytest.raises(StakePowerError):
        SweepConfig(n=5, alpha=1.0, quotas=[1.2])
    with pytest.raises(StakePowerError):
        SweepConfig(n=5, alpha=-1.0)
    with pytest.raises(StakePowerError):
        SweepConfig(n=1, alpha=1.0)
    with pytest.raises(StakePowerError):
        SweepConfig(n=3, alpha=1.0, profiles=[[0.5, 0.5], [0.2, 0.3, 0.5]])
    cfg = SweepConfig(n=99, alpha=1.0, profiles=EXAMPLE_PROFILES, mode="exact")
    assert cfg.n == 5 and cfg.M == 5 and cfg.mode is Mode.EXACT


def test_example2_raw_ratios():
    cfg = SweepConfig(n=5, alpha=1.0, quotas=[0.5], mode=Mode.EXACT, ratio=Ratio.RAW,
                      profiles=EXAMPLE_PROFILES)
    res = run_sweep(cfg)
    assert res.per_profile_var[0, 0] == pytest.approx(0.60, abs=0.02)
    assert res.within_var[0] == pytest.approx(0.54, abs=0.05)
    agent1 = single_agent_simulation(5, 1.0, [0.5], profiles=EXAMPLE_PROFILES, ddof=0)
    assert agent1.variance[0] == pytest.approx(0.36, abs=0.05)


def test_ratio_statistics():
    b = np.array([[0.5], [0.5], [0.5]])
    mu, v, deg = ratio_statistics(b, np.full(3, 1 / 3), normalized=True)
    assert mu[0] == pytest.approx(1.0) and v[0] == pytest.approx(0.0, abs=1e-15) and not deg[0]
    mu, v, deg = ratio_statistics(np.zeros((3, 1)), np.full(3, 1 / 3), normalized=True)
    assert mu[0] == 0 and v[0] == 0 and deg[0]
    with pytest.raises(StakePowerError):
        ratio_statistics(np.array([[0.1], [0.9]]), np.array([0.0, 1.0]), normalized=False)


def test_symmetric_profile_has_no_within_variance():
    cfg = SweepConfig(n=4, alpha=1.0, quotas=[0.3, 0.5, 0.7], mode=Mode.EXACT,
                      profiles=[[0.25] * 4])
    res = run_sweep(cfg)
    assert np.allclose(res.within_var, 0, atol=1e-24)
    assert np.allclose(res.mean_ratio, 1.0)


def test_normalized_mean_ratio_is_one():
    # normalised power and weights both sum to one, so the mean ratio is 1/n * sum b/x
    cfg = SweepConfig(n=6, alpha=2.0, M=5, quotas=[0.5], mode=Mode.EXACT, seed=3)
    res = run_sweep(cfg)
    assert np.all(res.per_profile_mean > 0)
    assert np.all(res.per_profile_var >= 0)


def test_scale_independence_of_injected_profiles():
    base = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
    a = run_sweep(SweepConfig(n=5, alpha=1.0, quotas=[0.5], mode="exact",
                              profiles=[base / base.sum()]))
    b = run_sweep(SweepConfig(n=5, alpha=1.0, quotas=[0.5], mode="exact",
                              profiles=[(base * 1e6) / (base * 1e6).sum()]))
    assert np.allclose(a.within_var, b.within_var)


def test_sweep_reproducible_and_worker_independent():
    kw = dict(n=12, alpha=1.0, M=6, R=2000, quotas=np.linspace(0, 1, 11), seed=4)
    a = run_sweep(SweepConfig(**kw))
    b = run_sweep(SweepConfig(**kw, workers=3))
    assert np.array_equal(a.within_var, b.within_var)
    assert np.array_equal(a.mean_ratio, b.mean_ratio)
    # endpoints: nobody is pivotal at quota 0, so every profile is degenerate there
    assert a.degenerate[0] == 6


def test_quota_subset_gives_same_numbers():
    kw = dict(n=10, alpha=1.0, M=3, R=3000, seed=2)
    full = run_sweep(SweepConfig(**kw, quotas=[0.2, 0.5, 0.8]))
    one = run_sweep(SweepConfig(**kw, quotas=[0.5]))
    assert one.within_var[0] == full.within_var[1]


def test_fixed_quota_symmetric_profiles():
    cfg = SweepConfig(n=5, alpha=1.0, quotas=[0.5], mode="exact",
                      profiles=[[0.2] * 5, [0.2] * 5])
    res = fixed_quota_distribution(cfg, 0.5)
    assert res.within_var.tolist() == [0.0, 0.0] and not res.degenerate.any()
    with pytest.raises(StakePowerError):
        fixed_quota_distribution(cfg, 1.0)


def test_fixed_quota_whale_at_low_quota():
    # a single holder above the quota dictates, so only one ratio is non-zero
    cfg = SweepConfig(n=5, alpha=1.0, quotas=[0.07], mode="exact",
                      profiles=[[0.6, 0.1, 0.1, 0.1, 0.1]])
    res = fixed_quota_distribution(cfg, 0.07)
    assert res.within_var[0] > 0


def test_fixed_quota_matches_sweep_column():
    kw = dict(n=15, alpha=0.5, M=4, R=3000, seed=6, quotas=[0.07])
    res = fixed_quota_distribution(SweepConfig(**kw), 0.07)
    sweep = run_sweep(SweepConfig(**kw))
    assert np.array_equal(res.within_var, sweep.per_profile_var[:, 0])


def test_single_agent_unanimity_quota():
    # at quota 0.999 agent 1 swings only for the grand coalition of others,
    # provided nobody holds less than the 0.001 gap
    n = 5
    draws = (np.random.default_rng(k).dirichlet(np.ones(n)) for k in range(200))
    profs = [p for p in draws if p.min() > 0.002][:30]
    assert len(profs) == 30
    res = single_agent_simulation(n, 1.0, [0.999], profiles=profs)
    r = np.array([(0.5 ** (n - 1)) / p[0] for p in profs])
    assert res.variance[0] == pytest.approx(r.var(ddof=1), rel=1e-9)
    assert res.mean_ratio[0] == pytest.approx(r.mean(), rel=1e-12)


def test_single_agent_constant_profiles():
    res = single_agent_simulation(4, 1.0, [0.3, 0.6], profiles=[[0.25] * 4] * 3)
    assert np.all(res.variance == 0)


def test_single_agent_methods_agree_roughly():
    kw = dict(n=8, alpha=1.0, quotas=[0.5], profiles_per_point=10, seed=1)
    ex = single_agent_simulation(**kw, method="exact")
    mc = single_agent_simulation(**kw, method="montecarlo", R=20_000)
    assert mc.mean_ratio[0] == pytest.approx(ex.mean_ratio[0], rel=0.05)


def test_single_agent_errors():
    with pytest.raises(StakePowerError):
        single_agent_simulation(5, 1.0, [0.0])
    with pytest.raises(StakePowerError):
        single_agent_simulation(5, 1.0, [0.5], profiles_per_point=1)
    with pytest.raises(StakePowerError):
        single_agent_simulation(5, 1.0, [0.5], method="guess")
    with pytest.raises(StakePowerError):
        single_agent_simulation(5, 1.0, [0.5], profiles=[[0.2] * 5], ddof=1)


def test_sweep_variance_falls_toward_majority():
    cfg = SweepConfig(n=30, alpha=1.0, M=20, R=5000, quotas=[0.1, 0.3, 0.5], seed=0)
    v = run_sweep(cfg).within_var
    assert v[0] > v[1] > v[2]
