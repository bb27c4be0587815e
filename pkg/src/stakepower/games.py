"""Weighted quota games: profiles, voting weight allocation and Banzhaf indices.

A coalition ``C`` wins under relative quota ``theta`` when its share of the
total weight reaches the quota, ``sum(w[C]) >= theta``.  Agent ``i`` is
pivotal for ``C`` (not containing ``i``) when ``C`` loses and ``C + {i}`` wins.

All comparisons against a quota go through :data:`TIE_TOL`: a weight sum
``s`` counts as reaching ``theta`` when ``s >= theta - TIE_TOL``.  Normalised
integer stakes land exactly on the quota often enough that plain float
comparison would make the answer depend on summation order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateStakesError,
    EnumerationLimitError,
    StakePowerError,
    ZeroStakePivotError,
)

TIE_TOL = 1e-12
ENUMERATION_LIMIT = 30
SIMPLEX_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class VWA(str, enum.Enum):
    """Voting weight allocation applied to raw stakes."""

    LINEAR = "linear"
    PENROSE = "penrose"


@dataclass(frozen=True)
class StakeProfile:
    stakes: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.stakes)
        if arr.ndim != 1 or arr.size == 0:
            raise StakePowerError("stake profile must be a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise StakePowerError("stakes must be finite and non-negative")
        if not np.any(arr > 0):
            raise DegenerateStakesError("degenerate stakes: no positive entry")
        object.__setattr__(self, "stakes", arr)

    @property
    def n(self) -> int:
        return self.stakes.size

    def __len__(self) -> int:
        return self.stakes.size


@dataclass(frozen=True)
class WeightProfile:
    """A point on the probability simplex, one coordinate per agent."""

    weights: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.weights)
        if arr.ndim != 1 or arr.size == 0:
            raise StakePowerError("weight profile must be a non-empty vector")
        if np.any(arr < 0) or np.any(arr > 1) or not np.all(np.isfinite(arr)):
            raise StakePowerError("weights must lie in [0, 1]")
        if abs(math.fsum(arr) - 1.0) > SIMPLEX_TOL:
            raise StakePowerError(
                f"weights must sum to 1 (got {math.fsum(arr)!r})"
            )
        object.__setattr__(self, "weights", arr)

    @property
    def n(self) -> int:
        return self.weights.size

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class QuotaRule:
    theta: float
    vwa: VWA = VWA.LINEAR

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise StakePowerError(f"quota must lie in (0, 1), got {self.theta}")
        object.__setattr__(self, "vwa", VWA(self.vwa))


@dataclass(frozen=True)
class PowerProfile:
    """Banzhaf indices of every agent.

    ``normalized`` is ``raw / raw.sum()``, or all zeros when no agent is ever
    pivotal; ``degenerate`` flags the latter case.
    """

    raw: np.ndarray
    normalized: np.ndarray = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self):
        raw = _frozen_array(self.raw)
        if np.any(raw < 0) or np.any(raw > 1):
            raise StakePowerError("Banzhaf indices must lie in [0, 1]")
        total = raw.sum()
        if total > 0:
            norm = raw / total
        else:
            norm = np.zeros_like(raw)
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "normalized", _frozen_array(norm))
        object.__setattr__(self, "degenerate", bool(total <= 0))

    def __len__(self) -> int:
        return self.raw.size


@dataclass(frozen=True)
class Project:
    id: str
    cost: float
    approvals: tuple[bool, ...]

    def __post_init__(self):
        if self.cost < 0:
            raise StakePowerError(f"project {self.id!r} has negative cost")
        object.__setattr__(self, "approvals", tuple(bool(a) for a in self.approvals))

    def score(self, stakes: np.ndarray) -> float:
        """Stake-weighted approval score."""
        if len(self.approvals) != len(stakes):
            raise StakePowerError(
                f"project {self.id!r}: {len(self.approvals)} approvals for "
                f"{len(stakes)} agents"
            )
        mask = np.fromiter(self.approvals, dtype=bool, count=len(self.approvals))
        return math.fsum(np.asarray(stakes, dtype=float)[mask])


def _as_stakes(s) -> StakeProfile:
    return s if isinstance(s, StakeProfile) else StakeProfile(np.asarray(s, float))


def _as_weights(w) -> WeightProfile:
    return w if isinstance(w, WeightProfile) else WeightProfile(np.asarray(w, float))


def apply_vwa(s, rule: QuotaRule | VWA | str) -> WeightProfile:
    """Map stakes to normalised voting weights (linear or square-root)."""
    s = _as_stakes(s)
    vwa = rule.vwa if isinstance(rule, QuotaRule) else VWA(rule)
    raw = s.stakes if vwa is VWA.LINEAR else np.sqrt(s.stakes)
    total = math.fsum(raw)
    if total <= 0:
        raise DegenerateStakesError("degenerate stakes: no positive entry")
    return WeightProfile(raw / total)


def coalition_wins(w, coalition: Iterable[int], theta: float) -> bool:
    w = _as_weights(w)
    idx = list(coalition)
    if any(i < 0 or i >= w.n for i in idx):
        raise StakePowerError("coalition index out of range")
    return math.fsum(w.weights[sorted(set(idx))]) >= theta - TIE_TOL


def _subset_sums(values: np.ndarray) -> np.ndarray:
    sums = np.zeros(1)
    for v in values:
        sums = np.concatenate((sums, sums + v))
    return sums


def _agent_pivot_counts(w: np.ndarray, i: int, thresholds: np.ndarray) -> np.ndarray:
    """Exact swing counts ``#{C not containing i: t - w_i <= w(C) < t}``.

    Counts are obtained by splitting the other agents into two halves and
    pairing their subset sums (meet in the middle), so every one of the
    ``2^(n-1)`` coalitions is counted without materialising all of them.
    """
    others = np.delete(w, i)
    k = others.size // 2
    left = _subset_sums(others[:k])
    right = np.sort(_subset_sums(others[k:]))
    # F(t) = #{(a, b): a + b < t}
    hi = thresholds[:, None] - left[None, :]
    lo = hi - w[i]
    below_hi = np.searchsorted(right, hi, side="left").sum(axis=1)
    below_lo = np.searchsorted(right, lo, side="left").sum(axis=1)
    return (below_hi - below_lo).astype(np.int64)


def _pivot_counts(w: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Swing counts for every agent, shape ``(n, len(thresholds))``."""
    out = np.zeros((w.size, thresholds.size), dtype=np.int64)
    for i in range(w.size):
        out[i] = _agent_pivot_counts(w, i, thresholds)
    return out


def banzhaf_agent_grid(w, agent: int, quotas: Sequence[float],
                       limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """Exact raw Banzhaf index of one agent at every quota.

    Only the ``2^(n-1)`` coalitions of the other agents are involved, so the
    guard applies to ``n - 1``.
    """
    w = _as_weights(w)
    if not 0 <= agent < w.n:
        raise StakePowerError("agent index out of range")
    if w.n - 1 > limit:
        raise EnumerationLimitError(
            f"exact enumeration over {w.n - 1} other agents exceeds the limit of {limit}"
        )
    q = np.atleast_1d(np.asarray(quotas, dtype=float))
    return _agent_pivot_counts(w.weights, agent, q - TIE_TOL) / float(2 ** (w.n - 1))


def banzhaf_enumerate_grid(
    w, quotas: Sequence[float], limit: int = ENUMERATION_LIMIT
) -> np.ndarray:
    """Exact raw Banzhaf indices for every agent and quota, shape ``(n, Q)``."""
    w = _as_weights(w)
    if w.n > limit:
        raise EnumerationLimitError(
            f"exact enumeration over {w.n} agents exceeds the limit of {limit}; "
            "use banzhaf_dp for integer stakes or the Monte Carlo estimator"
        )
    q = np.atleast_1d(np.asarray(quotas, dtype=float))
    counts = _pivot_counts(w.weights, q - TIE_TOL)
    return counts / float(2 ** (w.n - 1))


def banzhaf_enumerate(w, theta: float, limit: int = ENUMERATION_LIMIT) -> PowerProfile:
    """Exact Banzhaf indices by counting all coalitions of the other agents.

    >>> w = apply_vwa([10, 90, 100, 200, 600], VWA.PENROSE)
    >>> banzhaf_enumerate(w, 0.5).raw.tolist()
    [0.0, 0.25, 0.25, 0.25, 0.75]
    """
    return PowerProfile(banzhaf_enumerate_grid(w, [theta], limit)[:, 0])


def quota_stake_for(theta: float, stakes: Sequence[int]) -> int:
    """Smallest integer stake total that wins under relative quota ``theta``.

    Exact rational arithmetic, consistent with the :data:`TIE_TOL` rule used
    for normalised weights.
    """
    total = sum(int(x) for x in stakes)
    return math.ceil((Fraction(theta) - Fraction(TIE_TOL)) * total)


def banzhaf_dp(s: Sequence[int], quota_stake: int) -> PowerProfile:
    """Exact Banzhaf indices for integer stakes by subset-sum counting.

    For every agent the number of coalitions of the others with total stake
    ``t`` is assembled from prefix and suffix count tables; the agent swings
    for totals in ``[quota_stake - s_i, quota_stake - 1]``.  Counts are exact
    int64 up to 62 agents; beyond that the tables hold probabilities.
    """
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.size == 0:
        raise StakePowerError("stake vector must be non-empty")
    if not np.all(np.equal(np.mod(arr, 1), 0)) or np.any(arr < 0):
        raise StakePowerError("banzhaf_dp requires non-negative integer stakes")
    stakes = [int(x) for x in arr]
    n = len(stakes)
    total = sum(stakes)
    q = int(quota_stake)
    if not 0 < q <= total:
        raise StakePowerError(f"quota stake must lie in (0, {total}], got {q}")

    exact = n <= 62
    dtype = np.int64 if exact else np.float64
    step = 1 if exact else 0.5
    size = q  # only totals below the quota matter

    def add(table: np.ndarray, weight: int) -> np.ndarray:
        nxt = table * step
        if weight < size:
            nxt[weight:] += table[: size - weight] * step
        return nxt

    prefix = [np.zeros(size, dtype=dtype)]
    prefix[0][0] = 1
    for x in stakes[:-1]:
        prefix.append(add(prefix[-1], x))
    suffix = np.zeros(size, dtype=dtype)
    suffix[0] = 1

    raw = np.zeros(n)
    for i in range(n - 1, -1, -1):
        # cumulative suffix counts: csum[t] = #{suffix totals < t}
        csum = np.concatenate(([0], np.cumsum(suffix)))
        lo = max(q - stakes[i], 0)
        t = np.arange(size)
        upper = np.clip(q - t, 0, size)
        lower = np.clip(lo - t, 0, size)
        swings = (prefix[i] * (csum[upper] - csum[lower])).sum()
        if exact:
            raw[i] = int(swings) / float(2 ** (n - 1))
        else:
            raw[i] = float(swings)
        suffix = add(suffix, stakes[i])
    return PowerProfile(raw)


def power_stake_ratios(power: PowerProfile, w, normalized: bool = False) -> np.ndarray:
    """Banzhaf index divided by weight, agent by agent.

    Agents with zero weight get ratio 0; one of them holding positive power
    means the inputs are inconsistent.
    """
    w = _as_weights(w)
    b = power.normalized if normalized else power.raw
    if b.size != w.n:
        raise StakePowerError("power and weight profiles differ in length")
    zero = w.weights == 0
    if np.any(b[zero] > 0):
        raise ZeroStakePivotError("zero-stake pivotal agent")
    out = np.zeros(w.n)
    out[~zero] = b[~zero] / w.weights[~zero]
    return out


def greedy_select(
    projects: Sequence[Project], s, budget: float, seed: int | None = 0
) -> list[str]:
    """Fund projects in decreasing approval score while the budget allows.

    Infeasible projects are skipped; equal scores are ordered uniformly at
    random using ``seed``.
    """
    s = _as_stakes(s)
    if budget < 0:
        raise StakePowerError("budget must be non-negative")
    rng = np.random.default_rng(seed)
    scores = [p.score(s.stakes) for p in projects]
    tiebreak = rng.permutation(len(projects))
    order = sorted(range(len(projects)), key=lambda j: (-scores[j], tiebreak[j]))
    remaining = budget
    chosen = []
    for j in order:
        if projects[j].cost <= remaining:
            chosen.append(projects[j].id)
            remaining -= projects[j].cost
    return chosen
