"""Expected power-stake ratio and single-agent variance under Dirichlet weights.

Agent 1 has weight ``c`` with the Beta(alpha, (n-1) alpha) law.  Given
``c``, the other weights rescaled by ``1 / (1 - c)`` are again symmetric
Dirichlet, so a uniformly random size-``k`` coalition of them has a
Beta(k alpha, (n-1-k) alpha) share and agent 1's expected Banzhaf index is a
mixture of Beta CDF differences over ``k``.  Integrating that against the
density of ``c`` gives the moments of ``B_1 / X_1``.

The integrand is piecewise smooth with known breakpoints at ``c = theta`` and
``c = 1 - theta`` (where agent 1 gains the empty-coalition or grand-coalition
swing, or becomes a dictator), so each piece is integrated separately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate

from . import _backend
from .errors import NumericalError, StakePowerError
from .quadrature import adaptive_simpson

log = logging.getLogger(__name__)

INTEGRAND_GUARD = 1e6
VARIANCE_CLAMP = 1e-10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class AnalyticConfig:
    n: int
    alpha: float
    quad_abs_tol: float = 1e-9
    quad_max_depth: int = 50
    c_epsilon: float = 1e-9

    def __post_init__(self):
        if self.n < 3:
            raise StakePowerError("analytic formulas need n >= 3")
        if self.alpha <= 0:
            raise StakePowerError("alpha must be positive")
        if self.quad_abs_tol <= 0 or self.c_epsilon <= 0 or self.quad_max_depth < 1:
            raise StakePowerError("quadrature settings must be positive")

    @cached_property
    def _coalition_terms(self):
        n, a = self.n, self.alpha
        k = np.arange(1, n - 1, dtype=float)
        log_w = (
            math.lgamma(n)
            - np.array([math.lgamma(x + 1) + math.lgamma(n - x) for x in k])
            - (n - 1) * math.log(2.0)
        )
        ka, kb = k * a, (n - 1 - k) * a
        lbeta = np.array(
            [math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q) for p, q in zip(ka, kb)]
        )
        return np.exp(log_w), ka, kb, lbeta

    @cached_property
    def log_density_norm(self) -> float:
        n, a = self.n, self.alpha
        return math.lgamma(n * a) - math.lgamma(a) - math.lgamma((n - 1) * a)


def _cond_banzhaf_array(c: np.ndarray, theta: float, cfg: AnalyticConfig, kernels=None):
    kern = kernels or _backend.get()
    kw, ka, kb, lbeta = cfg._coalition_terms
    out = kern.cond_banzhaf(
        np.ascontiguousarray(c, dtype=np.float64), float(theta), int(cfg.n),
        float(cfg.alpha), kw, ka, kb, lbeta, _GL_X, _GL_W,
    )
    if np.isnan(out).any():
        raise NumericalError("conditional Banzhaf evaluation failed to converge")
    return out


def conditional_banzhaf(c, theta: float, cfg: AnalyticConfig, kernels=None):
    """Expected Banzhaf index of agent 1 given that its weight equals ``c``.

    Accepts a scalar or an array of weights in ``(0, 1)``.
    """
    if not 0.0 < theta < 1.0:
        raise StakePowerError("quota must lie in (0, 1)")
    arr = np.atleast_1d(np.asarray(c, dtype=float))
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise StakePowerError("agent weight must lie in the open interval (0, 1)")
    out = _cond_banzhaf_array(arr, theta, cfg, kernels)
    return float(out[0]) if np.ndim(c) == 0 else out


def _pieces(theta: float):
    if theta <= 0.5:
        return [(0.0, theta, False), (theta, 1.0 - theta, False), (1.0 - theta, 1.0, True)]
    return [(0.0, 1.0 - theta, False), (1.0 - theta, theta, False), (theta, 1.0, True)]


def _moments(theta: float, cfg: AnalyticConfig, kernels=None) -> np.ndarray:
    """``[E(B/X1), E((B/X1)^2)]`` by piecewise adaptive quadrature.

    Endpoint singularities of the Beta density (``alpha < 1`` at ``c = 0``,
    ``(n-1) alpha < 1`` at ``c = 1``) are removed with the power substitutions
    ``c = u^(1/alpha)`` and ``1 - c = v^(1/((n-1) alpha))``.  The integration
    variable is clipped ``c_epsilon`` away from 0 and 1; the clipped slivers
    are added back as width times the (bounded) integrand at the cut.
    """
    if not 0.0 < theta < 1.0:
        raise StakePowerError("quota must lie in (0, 1)")
    n, alpha, eps = cfg.n, cfg.alpha, cfg.c_epsilon
    b = (n - 1) * alpha
    lnorm = cfg.log_density_norm
    total = np.zeros(2)

    def ratios(c, dictator):
        bz = np.ones_like(c) if dictator else _cond_banzhaf_array(c, theta, cfg, kernels)
        r = bz / c
        return np.stack((r, r * r), axis=1)

    def guarded(values):
        if values.size and np.max(np.abs(values[0])) > INTEGRAND_GUARD:
            raise NumericalError(
                f"integrand {np.max(values[0]):.3g} at the clipped endpoint exceeds "
                f"{INTEGRAND_GUARD:g}"
            )
        return values

    for lo, hi, dictator in _pieces(theta):
        if hi - lo <= 0:
            continue
        if lo == 0.0 and alpha < 1.0:
            def g(u, dictator=dictator):
                c = u ** (1.0 / alpha)
                w = np.exp(lnorm + (b - 1.0) * np.log1p(-c) - math.log(alpha))
                return w[:, None] * ratios(c, dictator)
            a_, b_ = eps, hi**alpha
            nat_lo, nat_hi = 0.0, b_
        elif hi == 1.0 and b < 1.0:
            def g(v, dictator=dictator):
                c = 1.0 - v ** (1.0 / b)
                w = np.exp(lnorm + (alpha - 1.0) * np.log(c) - math.log(b))
                return w[:, None] * ratios(c, dictator)
            a_, b_ = eps, (1.0 - lo) ** b
            nat_lo, nat_hi = 0.0, b_
        else:
            def g(c, dictator=dictator):
                w = np.exp(lnorm + (alpha - 1.0) * np.log(c) + (b - 1.0) * np.log1p(-c))
                return w[:, None] * ratios(c, dictator)
            a_, b_ = max(lo, eps), min(hi, 1.0 - eps)
            nat_lo, nat_hi = lo, hi
        if lo == 0.0:
            guarded(g(np.array([a_])))
        if b_ <= a_:
            continue
        val, info = adaptive_simpson(g, a_, b_, cfg.quad_abs_tol, cfg.quad_max_depth)
        if info.depth_limited:
            log.debug("quadrature hit max depth on %d intervals (theta=%g)", info.depth_limited, theta)
        total += val
        # the integrand is bounded at the clipped ends; add the cut-off slivers
        if a_ > nat_lo:
            total += (a_ - nat_lo) * g(np.array([a_]))[0]
        if nat_hi > b_:
            total += (nat_hi - b_) * g(np.array([b_]))[0]
    return total


def expected_ratio(theta: float, cfg: AnalyticConfig, kernels=None) -> float:
    """Expected power-stake ratio ``E(B_1 / X_1)`` of a single agent."""
    return float(_moments(theta, cfg, kernels)[0])


def _variance_from_moments(m: np.ndarray, theta: float) -> float:
    var = m[1] - m[0] ** 2
    if var < 0:
        if var < -VARIANCE_CLAMP:
            raise NumericalError(f"negative variance {var:.3g} at theta={theta}")
        log.info("clamped variance %.3g to 0 at theta=%g", var, theta)
        var = 0.0
    return float(var)


def single_agent_variance(theta: float, cfg: AnalyticConfig, kernels=None) -> float:
    """Variance of ``B_1 / X_1`` over random Dirichlet weight profiles."""
    return _variance_from_moments(_moments(theta, cfg, kernels), theta)


def analytic_curve(thetas, cfg: AnalyticConfig, kernels=None):
    """Expected ratio and single-agent variance for every quota in ``thetas``."""
    thetas = np.asarray(thetas, dtype=float)
    mean = np.empty(thetas.size)
    var = np.empty(thetas.size)
    for j, t in enumerate(thetas):
        m = _moments(float(t), cfg, kernels)
        mean[j] = m[0]
        var[j] = _variance_from_moments(m, float(t))
    return mean, var


def jelnov_expected_ratio(n: int) -> float:
    """Expected ratio for uniform weights and majority quota via binomial sums.

    Uses the uniform-simplex density ``(n-1)(1-c)^(n-2)`` and expresses each
    Beta(k, n-1-k) CDF as a binomial upper tail; integrated with QUADPACK so
    that it shares no code with :func:`expected_ratio`.
    """
    if n < 3:
        raise StakePowerError("need n >= 3")
    m = n - 2
    j = np.arange(m + 1)
    comb_m = np.array([math.comb(m, int(x)) for x in j], dtype=float)
    size_w = np.array([math.comb(n - 1, k) for k in range(1, n - 1)], dtype=float)

    def tails(p):
        pmf = comb_m * p**j * (1.0 - p) ** (m - j)
        # tail[k] = P(Bin(m, p) >= k) for k = 1..m
        return np.cumsum(pmf[::-1])[::-1][1:]

    def swing(c):
        h_hi = 0.5 / (1.0 - c)
        h_lo = (0.5 - c) / (1.0 - c)
        diff = tails(h_hi) - tails(h_lo)
        return (n - 1) * (1.0 - c) ** (n - 2) * (size_w @ diff) / c / 2.0 ** (n - 1)

    def dictator(c):
        return (n - 1) * (1.0 - c) ** (n - 2) / c

    first, _ = integrate.quad(swing, 0.0, 0.5, epsabs=1e-13, epsrel=1e-12, limit=500)
    second, _ = integrate.quad(dictator, 0.5, 1.0, epsabs=1e-13, epsrel=1e-12, limit=500)
    return first + second
