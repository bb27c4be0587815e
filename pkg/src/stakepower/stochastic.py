"""Random stake models, Beta-function machinery and Gamma fitting."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NumericalError, StakePowerError
from .games import WeightProfile

CF_EPS = 1e-15
CF_MAXIT = 10_000
_FPMIN = 1e-300


@dataclass(frozen=True)
class GammaParams:
    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise StakePowerError(
                f"Gamma parameters must be positive, got ({self.alpha}, {self.beta})"
            )

    @property
    def mean(self) -> float:
        return self.alpha * self.beta

    @property
    def variance(self) -> float:
        return self.alpha * self.beta**2


def _tag_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag)
    return zlib.crc32(str(tag).encode())


def make_rng(seed, *tag) -> np.random.Generator:
    """Independent generator for ``(seed, *tag)``.

    Streams for different tags are statistically independent and do not
    depend on the order in which they are requested, which is what makes
    block- and profile-parallel runs reproducible.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence(
        entropy=int(seed) & (2**64 - 1), spawn_key=tuple(_tag_int(t) for t in tag)
    )
    return np.random.Generator(np.random.PCG64(ss))


def standard_gamma(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Gamma(shape, 1) variates by Marsaglia-Tsang squeeze rejection.

    For ``shape < 1`` draws Gamma(shape + 1) and multiplies by ``U**(1/shape)``.
    """
    if shape <= 0:
        raise StakePowerError("Gamma shape must be positive")
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = int(1.05 * (size - filled)) + 16
        x = rng.standard_normal(m)
        u = rng.random(m)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * np.log(v))
        vals = d * v[accept]
        take = min(vals.size, size - filled)
        out[filled : filled + take] = vals[:take]
        filled += take
    if boost:
        u = rng.random(size)
        out *= np.exp(np.log(u) / shape)
    return out


def sample_gamma(params: GammaParams, n: int, seed=0, *tag) -> np.ndarray:
    """``n`` i.i.d. Gamma(alpha, beta) draws (shape, scale parametrisation)."""
    if n < 1:
        raise StakePowerError("sample size must be positive")
    rng = make_rng(seed, "gamma", *tag)
    return params.beta * standard_gamma(rng, params.alpha, n)


def sample_dirichlet_symmetric(
    alpha: float, n: int, seed=0, *tag, scale: float = 1.0
) -> WeightProfile:
    """Symmetric Dirichlet weight profile from normalised Gamma stakes.

    ``scale`` is the Gamma scale of the underlying stakes; it cancels in the
    normalisation and exists to make that invariance testable.
    """
    if n < 2:
        raise StakePowerError("a Dirichlet profile needs at least two agents")
    params = GammaParams(alpha, scale)
    rng = make_rng(seed, "dirichlet", *tag)
    while True:
        s = params.beta * standard_gamma(rng, params.alpha, n)
        total = math.fsum(s)
        if total > 0:
            w = s / total
            # absorb the last rounding error so the simplex check holds
            w[np.argmax(w)] += 1.0 - math.fsum(w)
            return WeightProfile(w)


# --- regularized incomplete Beta ------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h
    raise NumericalError(f"incomplete Beta continued fraction did not converge (a={a}, b={b}, x={x})")


def reg_inc_beta(h: float, a: float, b: float) -> float:
    """Regularized incomplete Beta function ``I_h(a, b)``.

    Lentz evaluation of the continued fraction, applied to ``I_{1-h}(b, a)``
    when ``h`` lies beyond the mean-like switch point ``(a+1)/(a+b+2)``.
    """
    if not 0.0 <= h <= 1.0:
        raise StakePowerError(f"incomplete Beta argument must lie in [0, 1], got {h}")
    if a <= 0 or b <= 0:
        raise StakePowerError("incomplete Beta parameters must be positive")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(h) + b * math.log1p(-h)
    )
    front = math.exp(log_front)
    if h < (a + 1.0) / (a + b + 2.0):
        return min(1.0, front * _betacf(a, b, h) / a)
    return max(0.0, 1.0 - front * _betacf(b, a, 1.0 - h) / b)


def reg_inc_beta_array(h, a, b) -> np.ndarray:
    """Vectorised :func:`reg_inc_beta` over broadcast arrays (no validation)."""
    h, a, b = np.broadcast_arrays(
        np.asarray(h, float), np.asarray(a, float), np.asarray(b, float)
    )
    out = np.where(h >= 1.0, 1.0, 0.0)
    inner = (h > 0.0) & (h < 1.0)
    if not inner.any():
        return out
    x, aa, bb = h[inner], a[inner], b[inner]
    swap = x >= (aa + 1.0) / (aa + bb + 2.0)
    p = np.where(swap, bb, aa)
    q = np.where(swap, aa, bb)
    y = np.where(swap, 1.0 - x, x)
    log_front = (
        special.gammaln(p + q) - special.gammaln(p) - special.gammaln(q)
        + p * np.log(y) + q * np.log1p(-y)
    )
    val = np.exp(log_front) * _betacf_array(p, q, y) / p
    out[inner] = np.clip(np.where(swap, 1.0 - val, val), 0.0, 1.0)
    return out


def _betacf_array(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.max(np.abs(delta - 1.0)) < CF_EPS:
            return h
    raise NumericalError("incomplete Beta continued fraction did not converge")


# --- density of a single Dirichlet coordinate -----------------------------


def log_beta_density_x1(c, n: int, alpha: float):
    """Log-density of one coordinate of a symmetric Dirichlet(alpha) profile."""
    b = (n - 1) * alpha
    log_norm = math.lgamma(n * alpha) - math.lgamma(alpha) - math.lgamma(b)
    c = np.asarray(c, dtype=float)
    with np.errstate(divide="ignore"):
        return log_norm + (alpha - 1.0) * np.log(c) + (b - 1.0) * np.log1p(-c)


def beta_density_x1(c: float, n: int, alpha: float) -> float:
    """Beta(alpha, (n-1) alpha) density: the law of agent 1's weight.

    >>> round(beta_density_x1(0.25, 3, 1.0), 12)
    1.5
    """
    if n < 2 or alpha <= 0:
        raise StakePowerError("need n >= 2 and alpha > 0")
    if not 0.0 < c < 1.0:
        raise StakePowerError(
            "density of agent 1's weight is only defined on the open interval (0, 1)"
        )
    return float(np.exp(log_beta_density_x1(c, n, alpha)))


# --- Gamma maximum likelihood ----------------------------------------------


def gamma_log_likelihood(stakes, params: GammaParams) -> float:
    w = np.asarray(stakes, dtype=float)
    a, b = params.alpha, params.beta
    return float(
        np.sum((a - 1.0) * np.log(w) - w / b - a * math.log(b) - math.lgamma(a))
    )


def fit_gamma_mle(stakes, tol: float = 1e-10, max_iter: int = 100) -> GammaParams:
    """Maximum-likelihood Gamma(shape, scale) fit.

    The scale is profiled out (``beta = mean / alpha``), leaving the shape
    equation ``log(alpha) - digamma(alpha) = log(mean) - mean(log w)``,
    solved by Newton's method from the usual closed-form starting point.
    """
    w = np.asarray(stakes, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise StakePowerError("need at least two stake values to fit")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise StakePowerError("log-likelihood undefined for non-positive stakes")
    if np.all(w == w[0]):
        raise StakePowerError("degenerate sample (alpha -> infinity): all stakes equal")
    mean = math.fsum(w) / w.size
    s = math.log(mean) - math.fsum(np.log(w)) / w.size
    if s <= 0:
        raise NumericalError("degenerate sample (alpha -> infinity)")
    alpha = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        f = math.log(alpha) - special.digamma(alpha) - s
        fp = 1.0 / alpha - special.polygamma(1, alpha)
        step = f / fp
        new = alpha - step
        while new <= 0:
            step /= 2.0
            new = alpha - step
        alpha = new
        if abs(step) < tol:
            break
    else:
        raise NumericalError("Gamma MLE Newton iteration did not converge")
    return GammaParams(float(alpha), mean / float(alpha))


# --- descriptive statistics ------------------------------------------------


@dataclass(frozen=True)
class StakeSummary:
    count: int
    min: float
    median: float
    mean: float
    max: float


def stake_summary(stakes) -> StakeSummary:
    """Count, extremes, lower-middle median and mean of a stake sample."""
    w = np.sort(np.asarray(stakes, dtype=float))
    if w.size == 0:
        raise StakePowerError("cannot summarise an empty stake sample")
    return StakeSummary(
        count=int(w.size),
        min=float(w[0]),
        median=float(w[(w.size - 1) // 2]),
        mean=math.fsum(w) / w.size,
        max=float(w[-1]),
    )
