"""Profile sweeps over a quota grid, fixed-quota studies and the single-agent
simulation used to cross-check the analytic variance.

Every random quantity is keyed by ``(seed, purpose, index)`` through
:func:`stakepower.stochastic.make_rng`, so a sweep gives the same numbers
whatever the number of workers and whichever quotas are requested.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import StakePowerError
from .games import (
    ENUMERATION_LIMIT,
    WeightProfile,
    _as_weights,
    banzhaf_agent_grid,
    banzhaf_enumerate_grid,
)
from .montecarlo import pivot_counts_sampled
from .stochastic import sample_dirichlet_symmetric


class Mode(str, enum.Enum):
    MONTE_CARLO = "montecarlo"
    EXACT = "exact"


class Ratio(str, enum.Enum):
    NORMALIZED = "normalized"
    RAW = "raw"


def default_quota_grid(points: int = 101) -> np.ndarray:
    """Evenly spaced quotas on ``[0, 1]``, endpoints included."""
    if points < 2:
        raise StakePowerError("a quota grid needs at least two points")
    return np.linspace(0.0, 1.0, points)


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of a profile sweep.

    ``profiles`` replaces Dirichlet sampling with explicit weight profiles;
    ``M`` and ``n`` are then taken from it.
    """

    n: int
    alpha: float
    M: int = 100
    R: int = 15_000
    quotas: np.ndarray = field(default_factory=default_quota_grid)
    seed: int = 0
    mode: Mode = Mode.MONTE_CARLO
    ratio: Ratio = Ratio.NORMALIZED
    profiles: tuple | None = None
    workers: int | None = 1

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.quotas, dtype=float))
        if q.ndim != 1 or q.size == 0:
            raise StakePowerError("quota grid must be a non-empty vector")
        if np.any(q < 0) or np.any(q > 1):
            raise StakePowerError("quotas must lie in [0, 1]")
        q.setflags(write=False)
        object.__setattr__(self, "quotas", q)
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "ratio", Ratio(self.ratio))
        if self.profiles is not None:
            profs = tuple(_as_weights(p) for p in self.profiles)
            if not profs:
                raise StakePowerError("profile list is empty")
            if any(p.n != profs[0].n for p in profs):
                raise StakePowerError("injected profiles differ in length")
            object.__setattr__(self, "profiles", profs)
            object.__setattr__(self, "n", profs[0].n)
            object.__setattr__(self, "M", len(profs))
        if self.n < 2:
            raise StakePowerError("need at least two agents")
        if self.alpha <= 0:
            raise StakePowerError("alpha must be positive")
        if self.M < 1 or self.R < 1:
            raise StakePowerError("M and R must be positive")

    def profile(self, m: int) -> WeightProfile:
        if self.profiles is not None:
            return self.profiles[m]
        return sample_dirichlet_symmetric(self.alpha, self.n, self.seed, "profile", m)


@dataclass(frozen=True)
class QuotaGridResult:
    """Per-quota averages over the sampled profiles.

    ``degenerate[j]`` is the number of profiles whose Banzhaf column at quota
    ``j`` was all zero (no agent ever pivotal).
    """

    quotas: np.ndarray
    mean_ratio: np.ndarray
    within_var: np.ndarray
    degenerate: np.ndarray
    per_profile_mean: np.ndarray | None = None
    per_profile_var: np.ndarray | None = None


@dataclass(frozen=True)
class FixedQuotaResult:
    theta: float
    mean_ratio: np.ndarray
    within_var: np.ndarray
    degenerate: np.ndarray


@dataclass(frozen=True)
class SingleAgentResult:
    quotas: np.ndarray
    mean_ratio: np.ndarray
    variance: np.ndarray
    repetitions: int
    profiles_per_point: int


def _banzhaf_matrix(cfg: SweepConfig, w: WeightProfile, m: int) -> np.ndarray:
    if cfg.mode is Mode.EXACT:
        return banzhaf_enumerate_grid(w, cfg.quotas)
    counts = pivot_counts_sampled(w.weights, cfg.quotas, cfg.R, cfg.seed, stream=("sweep", m))
    return counts / float(cfg.R)


def ratio_statistics(banzhaf: np.ndarray, weights: np.ndarray, normalized: bool):
    """Mean and population variance of the power-stake ratios per column.

    ``banzhaf`` is ``(n, Q)``.  Returns ``(mu, v, degenerate)`` with one entry
    per column; a column with no power at all yields ratios of zero.
    """
    b = np.asarray(banzhaf, dtype=float)
    x = np.asarray(weights, dtype=float)
    colsum = b.sum(axis=0)
    degenerate = colsum <= 0
    if normalized:
        b = np.divide(b, colsum, out=np.zeros_like(b), where=~degenerate)
    zero = x == 0
    if np.any(b[zero] > 0):
        raise StakePowerError("zero-stake pivotal agent")
    r = np.zeros_like(b)
    r[~zero] = b[~zero] / x[~zero, None]
    mu = r.mean(axis=0)
    v = ((r - mu) ** 2).mean(axis=0)
    return mu, v, degenerate


def _profile_stats(cfg: SweepConfig, m: int):
    w = cfg.profile(m)
    b = _banzhaf_matrix(cfg, w, m)
    return ratio_statistics(b, w.weights, cfg.ratio is Ratio.NORMALIZED)


def _map_profiles(cfg: SweepConfig):
    workers = cfg.workers or os.cpu_count() or 1
    if workers > 1 and cfg.M > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda m: _profile_stats(cfg, m), range(cfg.M)))
    return [_profile_stats(cfg, m) for m in range(cfg.M)]


def run_sweep(cfg: SweepConfig, keep_per_profile: bool = True) -> QuotaGridResult:
    """Average ratio and within-vector variance over ``cfg.M`` profiles."""
    stats = _map_profiles(cfg)
    mu = np.array([s[0] for s in stats])
    v = np.array([s[1] for s in stats])
    deg = np.array([s[2] for s in stats]).sum(axis=0)
    return QuotaGridResult(
        quotas=cfg.quotas.copy(),
        mean_ratio=mu.mean(axis=0),
        within_var=v.mean(axis=0),
        degenerate=deg.astype(np.int64),
        per_profile_mean=mu if keep_per_profile else None,
        per_profile_var=v if keep_per_profile else None,
    )


def fixed_quota_distribution(cfg: SweepConfig, theta: float) -> FixedQuotaResult:
    """Per-profile mean ratio and within-vector variance at a single quota.

    Profiles and coalition samples depend only on the seed, so two calls
    with different ``theta`` see the same profiles and the same samples.
    """
    if not 0.0 < theta < 1.0:
        raise StakePowerError("quota must lie in (0, 1)")
    single = SweepConfig(
        n=cfg.n, alpha=cfg.alpha, M=cfg.M, R=cfg.R, quotas=np.array([theta]),
        seed=cfg.seed, mode=cfg.mode, ratio=cfg.ratio, profiles=cfg.profiles,
        workers=cfg.workers,
    )
    stats = _map_profiles(single)
    return FixedQuotaResult(
        theta=float(theta),
        mean_ratio=np.array([s[0][0] for s in stats]),
        within_var=np.array([s[1][0] for s in stats]),
        degenerate=np.array([bool(s[2][0]) for s in stats]),
    )


def single_agent_simulation(
    n: int,
    alpha: float,
    quotas,
    profiles_per_point: int = 20,
    seed: int = 0,
    repetitions: int = 1,
    profiles=None,
    method: str = "auto",
    R: int = 15_000,
    ddof: int = 1,
) -> SingleAgentResult:
    """Simulated mean and variance of agent 1's raw power-stake ratio.

    Each repetition draws ``profiles_per_point`` Dirichlet profiles, computes
    agent 1's raw Banzhaf index at every quota (the same profiles serve all
    quotas) and takes the variance of the ratios; the reported figures are
    averages over repetitions.  ``profiles`` injects a fixed set of profiles
    instead (one repetition).  ``method`` is ``"exact"``, ``"montecarlo"`` or
    ``"auto"`` (exact whenever the other agents can be enumerated).
    """
    q = np.atleast_1d(np.asarray(quotas, dtype=float))
    if q.size == 0 or np.any(q <= 0) or np.any(q >= 1):
        raise StakePowerError("quotas must lie in (0, 1)")
    if method not in ("auto", "exact", "montecarlo"):
        raise StakePowerError(f"unknown method {method!r}")
    if profiles is not None:
        groups = [[_as_weights(p) for p in profiles]]
    else:
        if profiles_per_point < 2:
            raise StakePowerError("need at least two profiles per point")
        if repetitions < 1:
            raise StakePowerError("need at least one repetition")
        groups = [
            [sample_dirichlet_symmetric(alpha, n, seed, "single", r, k)
             for k in range(profiles_per_point)]
            for r in range(repetitions)
        ]
    if len(groups[0]) <= ddof:
        raise StakePowerError("not enough profiles for the requested ddof")
    n_agents = groups[0][0].n
    exact = method == "exact" or (method == "auto" and n_agents - 1 <= ENUMERATION_LIMIT)

    means, variances = [], []
    for r, group in enumerate(groups):
        ratios = np.empty((len(group), q.size))
        for k, w in enumerate(group):
            if exact:
                b = banzhaf_agent_grid(w, 0, q)
            else:
                counts = pivot_counts_sampled(w.weights, q, R, seed, stream=("single", r, k))
                b = counts[0] / float(R)
            if w.weights[0] == 0:
                if np.any(b > 0):
                    raise StakePowerError("zero-stake pivotal agent")
                ratios[k] = 0.0
            else:
                ratios[k] = b / w.weights[0]
        means.append(ratios.mean(axis=0))
        variances.append(ratios.var(axis=0, ddof=ddof))
    return SingleAgentResult(
        quotas=q.copy(),
        mean_ratio=np.mean(means, axis=0),
        variance=np.mean(variances, axis=0),
        repetitions=len(groups),
        profiles_per_point=len(groups[0]),
    )
