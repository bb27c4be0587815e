import math

import numpy as np
import pytest

from conftest import cond_banzhaf_oracle, moments_oracle
from stakepower.analytic import (
    AnalyticConfig,
    analytic_curve,
    conditional_banzhaf,
    expected_ratio,
    jelnov_expected_ratio,
    single_agent_variance,
)
from stakepower.errors import NumericalError, StakePowerError
from stakepower.games import banzhaf_agent_grid

# majority expected ratio for uniform weights, frozen from an arbitrary-precision
# evaluation of the binomial-tail formula; n = 3 also equals 2 log 2 - 1/2
JELNOV = {3: 0.8862943611198906, 5: 1.1892553889064479, 11: 1.8218591439047296}


def test_config_validation():
    with pytest.raises(StakePowerError):
        AnalyticConfig(n=2, alpha=1.0)
    with pytest.raises(StakePowerError):
        AnalyticConfig(n=5, alpha=0.0)
    with pytest.raises(StakePowerError):
        AnalyticConfig(n=5, alpha=1.0, quad_abs_tol=0.0)
    AnalyticConfig(n=30, alpha=1.0)  # even n is accepted


# --- conditional expected Banzhaf --------------------------------------------------


def test_dictator_region():
    for n, alpha in [(5, 1.0), (31, 0.3), (11, 5.0)]:
        assert conditional_banzhaf(0.7, 0.4, AnalyticConfig(n, alpha)) == 1.0
        assert conditional_banzhaf(0.75, 0.7, AnalyticConfig(n, alpha)) == 1.0


def test_three_agents_closed_form():
    # others split (1-c) uniformly; agent 1 swings iff one other lies in [0.6, 0.7)
    assert conditional_banzhaf(0.1, 0.7, AnalyticConfig(3, 1.0)) == pytest.approx(1 / 18, abs=1e-12)


def _simulated_swing(c, theta, n, alpha, samples, seed):
    rng = np.random.default_rng(seed)
    rest = rng.dirichlet(np.full(n - 1, alpha), size=samples) * (1 - c)
    member = rng.integers(0, 2, size=(samples, n - 1))
    s = (rest * member).sum(axis=1)
    swing = (s < theta - 1e-12) & (s + c >= theta - 1e-12)
    p = swing.mean()
    return p, math.sqrt(p * (1 - p) / samples)


@pytest.mark.parametrize("c,theta,n,alpha", [(0.1, 0.7, 3, 1.0), (0.51, 0.5, 5, 1.0),
                                             (0.2, 0.3, 7, 0.5), (0.3, 0.6, 6, 2.0)])
def test_conditional_against_simulation(c, theta, n, alpha):
    p, se = _simulated_swing(c, theta, n, alpha, 1_000_000, seed=3)
    assert conditional_banzhaf(c, theta, AnalyticConfig(n, alpha)) == pytest.approx(p, abs=3 * se)


def test_empty_coalition_term_present():
    cfg = AnalyticConfig(5, 1.0)
    val = conditional_banzhaf(0.51, 0.5, cfg)
    assert val > 1 / 16
    assert val == pytest.approx(cond_banzhaf_oracle(0.51, 0.5, 5, 1.0), abs=1e-12)


@pytest.mark.parametrize("theta", [0.07, 0.3, 0.5, 0.6, 0.93])
@pytest.mark.parametrize("n,alpha", [(5, 1.0), (31, 1.0), (12, 0.273568), (9, 5.0)])
def test_conditional_against_scipy_oracle(theta, n, alpha):
    cfg = AnalyticConfig(n, alpha)
    cs = np.concatenate((np.linspace(1e-6, 1 - 1e-6, 97), [theta, 1 - theta]))
    got = conditional_banzhaf(cs, theta, cfg)
    want = [cond_banzhaf_oracle(c, theta, n, alpha) for c in cs]
    assert np.allclose(got, want, rtol=1e-9, atol=1e-13)


@pytest.mark.parametrize("theta", [0.1, 0.45, 0.5, 0.55, 0.9])
def test_conditional_monotone_and_bounded(theta):
    cfg = AnalyticConfig(15, 1.5)
    cs = np.linspace(1e-5, 1 - 1e-5, 2001)
    vals = conditional_banzhaf(cs, theta, cfg)
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.all(np.diff(vals) >= -1e-12)


def test_conditional_domain():
    cfg = AnalyticConfig(5, 1.0)
    for c in (0.0, 1.0):
        with pytest.raises(StakePowerError):
            conditional_banzhaf(c, 0.5, cfg)
    with pytest.raises(StakePowerError):
        conditional_banzhaf(0.3, 1.0, cfg)


def test_atoms_at_case_boundaries():
    n, theta = 7, 0.3
    cfg = AnalyticConfig(n, 1.0)
    eps = 1e-9
    # at c = theta agent 1 starts swinging for the grand coalition of others
    left, right = conditional_banzhaf([theta - eps, theta + eps], theta, cfg)
    assert right - left == pytest.approx(0.5 ** (n - 1), rel=1e-4)
    # at c = 1 - theta agent 1 becomes a dictator
    left, right = conditional_banzhaf([1 - theta - eps, 1 - theta + eps], theta, cfg)
    assert right == 1.0 and left < 1.0


# --- expectation and variance ----------------------------------------------------------


@pytest.mark.parametrize("n", [3, 5, 11])
def test_majority_uniform_matches_frozen(n):
    assert jelnov_expected_ratio(n) == pytest.approx(JELNOV[n], abs=1e-10)
    assert expected_ratio(0.5, AnalyticConfig(n, 1.0)) == pytest.approx(JELNOV[n], abs=1e-6)


def test_jelnov_increasing():
    vals = [jelnov_expected_ratio(n) for n in (5, 11, 31, 81)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("theta,n,alpha", [(0.3, 11, 1.0), (0.6, 31, 1.0), (0.5, 9, 5.0),
                                           (0.07, 12, 0.273568), (0.8, 6, 0.6)])
def test_moments_against_quadpack_oracle(theta, n, alpha):
    cfg = AnalyticConfig(n, alpha)
    m1, m2 = moments_oracle(theta, n, alpha)
    assert expected_ratio(theta, cfg) == pytest.approx(m1, rel=1e-6, abs=1e-8)
    assert single_agent_variance(theta, cfg) == pytest.approx(m2 - m1**2, rel=1e-5, abs=1e-8)


def test_expected_ratio_high_quota_simulation():
    # exact Banzhaf on 10^5 sampled profiles; the mean of B/X1 is the target
    n, theta = 5, 0.99
    rng = np.random.default_rng(8)
    x = rng.dirichlet(np.ones(n), size=100_000)
    masks = np.array([[(m >> j) & 1 for j in range(n - 1)] for m in range(2 ** (n - 1))])
    s = x[:, 1:] @ masks.T
    swing = ((s < theta - 1e-12) & (s + x[:, :1] >= theta - 1e-12)).mean(axis=1)
    r = swing / x[:, 0]
    se = r.std() / math.sqrt(r.size)
    assert expected_ratio(theta, AnalyticConfig(n, 1.0)) == pytest.approx(r.mean(), abs=3 * se)


def test_jelnov_simulation_n31():
    n, samples = 31, 1500
    rng = np.random.default_rng(9)
    ratios = []
    for _ in range(samples):
        x = rng.dirichlet(np.ones(n))
        x[-1] = 1 - x[:-1].sum()
        ratios.append(banzhaf_agent_grid(x, 0, [0.5])[0] / x[0])
    ratios = np.array(ratios)
    se = ratios.std() / math.sqrt(samples)
    assert jelnov_expected_ratio(n) == pytest.approx(ratios.mean(), abs=3 * se)


def test_peak_at_majority_alpha5():
    cfg = AnalyticConfig(31, 5.0)
    mid = expected_ratio(0.5, cfg)
    assert mid > expected_ratio(0.3, cfg) and mid > expected_ratio(0.7, cfg)


def test_variance_decreases_with_n():
    assert single_agent_variance(0.5, AnalyticConfig(81, 1.0)) < single_agent_variance(
        0.5, AnalyticConfig(31, 1.0))


def test_quota_symmetry():
    cfg = AnalyticConfig(21, 2.0)
    for t in (0.2, 0.37, 0.45):
        assert expected_ratio(t, cfg) == pytest.approx(expected_ratio(1 - t, cfg), rel=1e-7)


def test_small_alpha_is_stable_under_clipping():
    a = AnalyticConfig(20, 0.273568)
    b = AnalyticConfig(20, 0.273568, c_epsilon=5e-10)
    assert expected_ratio(0.07, a) == pytest.approx(expected_ratio(0.07, b), abs=1e-7)


def test_variance_curve_minima_alpha1():
    thetas = np.round(np.arange(0.01, 1.0, 0.01), 2)
    _, var = analytic_curve(thetas, AnalyticConfig(31, 1.0))
    assert np.all(var >= 0)
    # interior dips between the side humps and the central peak
    low = (thetas >= 0.3) & (thetas < 0.5)
    high = (thetas > 0.5) & (thetas <= 0.7)
    assert 0.35 <= thetas[low][np.argmin(var[low])] <= 0.45
    assert 0.55 <= thetas[high][np.argmin(var[high])] <= 0.65
    mid = (thetas >= 0.2) & (thetas <= 0.8)
    assert abs(thetas[mid][np.argmax(var[mid])] - 0.5) <= 0.01


def test_integrand_guard(monkeypatch):
    from stakepower import analytic

    monkeypatch.setattr(analytic, "INTEGRAND_GUARD", 1e-3)
    with pytest.raises(NumericalError):
        expected_ratio(0.3, AnalyticConfig(5, 1.0))


def test_backends_agree(kernels):
    cfg = AnalyticConfig(17, 0.8)
    cs = np.linspace(1e-4, 1 - 1e-4, 301)
    for theta in (0.2, 0.5, 0.8):
        ref = conditional_banzhaf(cs, theta, cfg, kernels=None)
        assert np.allclose(conditional_banzhaf(cs, theta, cfg, kernels=kernels), ref,
                           rtol=1e-11, atol=1e-14)


def test_variance_is_that_of_conditional_expectation():
    # the closed-form variance is the spread of E[B | X1] / X1 over profiles
    cfg = AnalyticConfig(31, 1.0)
    x1 = np.random.default_rng(12).beta(1.0, 30.0, 20_000)
    for theta in (0.3, 0.6):
        r = conditional_banzhaf(x1, theta, cfg) / x1
        assert single_agent_variance(theta, cfg) == pytest.approx(r.var(), rel=0.08)
