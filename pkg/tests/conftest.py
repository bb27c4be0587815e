"""Independent oracles shared by the test modules.

None of these call into the package's numerical code paths: coalitions are
enumerated with itertools, Beta CDFs come from scipy, and integrals use
QUADPACK or a plain composite Simpson rule.
"""

import itertools
import math

import numpy as np
import pytest
from scipy import integrate, special

ORACLE_TOL = 1e-12  # same tie tolerance as the library's quota rule


def brute_banzhaf(w, theta):
    """Raw Banzhaf indices by listing every coalition of the other agents."""
    w = list(map(float, w))
    n = len(w)
    out = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        swings = 0
        for mask in itertools.product((0, 1), repeat=n - 1):
            s = math.fsum(w[j] for j, m in zip(others, mask) if m)
            if s < theta - ORACLE_TOL <= s + w[i]:
                swings += 1
        out.append(swings / 2 ** (n - 1))
    return np.array(out)


def simpson(f, a, b, m=20_000):
    """Composite Simpson rule with ``m`` (even) panels."""
    x = np.linspace(a, b, m + 1)
    y = f(x)
    h = (b - a) / m
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def cond_banzhaf_oracle(c, theta, n, alpha):
    """Expected Banzhaf index of agent 1 at weight ``c`` via scipy's betainc."""
    if (theta <= 0.5 and c >= 1 - theta) or (theta > 0.5 and c > theta):
        return 1.0
    total = 0.0
    for k in range(1, n - 1):
        a, b = k * alpha, (n - 1 - k) * alpha
        hi = special.betainc(a, b, min(theta / (1 - c), 1.0))
        lo = special.betainc(a, b, max((theta - c) / (1 - c), 0.0))
        total += math.comb(n - 1, k) * (hi - lo)
    total /= 2 ** (n - 1)
    # the empty coalition (theta > 1/2) or the grand coalition (theta <= 1/2)
    if (theta <= 0.5 and c > theta) or (theta > 0.5 and c >= 1 - theta):
        total += 0.5 ** (n - 1)
    return total


def moments_oracle(theta, n, alpha):
    """``E(B/X1)`` and ``E((B/X1)^2)`` by QUADPACK with the case breakpoints."""
    dens = lambda c: np.exp(
        special.gammaln(n * alpha) - special.gammaln(alpha) - special.gammaln((n - 1) * alpha)
        + (alpha - 1) * np.log(c) + ((n - 1) * alpha - 1) * np.log1p(-c)
    )
    pts = sorted({theta, 1 - theta})
    edges = [0.0, *pts, 1.0]
    m1 = m2 = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        f1 = lambda c: dens(c) * cond_banzhaf_oracle(c, theta, n, alpha) / c
        f2 = lambda c: dens(c) * (cond_banzhaf_oracle(c, theta, n, alpha) / c) ** 2
        m1 += integrate.quad(f1, lo, hi, epsabs=1e-12, epsrel=1e-11, limit=400)[0]
        m2 += integrate.quad(f2, lo, hi, epsabs=1e-12, epsrel=1e-11, limit=400)[0]
    return m1, m2


def greedy_oracle(scores, costs, budget, tiebreak):
    """Replay the greedy rule step by step: pick the best feasible project."""
    remaining = budget
    left = list(range(len(scores)))
    chosen = []
    while True:
        feasible = [j for j in left if costs[j] <= remaining]
        if not feasible:
            return chosen
        best = max(feasible, key=lambda j: (scores[j], -tiebreak[j]))
        chosen.append(best)
        remaining -= costs[best]
        left.remove(best)


@pytest.fixture(params=["python", "cython"])
def kernels(request):
    from stakepower import _backend

    if request.param not in _backend.available():
        pytest.skip("compiled kernels not built")
    return _backend.get(request.param)


# one PASS/FAIL line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
