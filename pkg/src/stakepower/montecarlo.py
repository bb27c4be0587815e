"""Monte Carlo estimation of Banzhaf pivot probabilities over a quota grid.

Coalitions are sampled by independent fair coin flips per agent.  One batch of
``R`` samples is shared by every agent and every quota, so a single pass
yields the whole ``(n, Q)`` matrix of estimates.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import StakePowerError
from .games import TIE_TOL, PowerProfile, _as_weights
from .stochastic import make_rng

DEFAULT_BLOCK = 4096


@dataclass(frozen=True)
class PivotEstimate:
    """Estimated pivot probabilities, one row per agent and one column per quota."""

    probs: np.ndarray
    quotas: np.ndarray
    samples: int
    seed: int

    @property
    def n(self) -> int:
        return self.probs.shape[0]


def _block_counts(x, q_eff, rows, seed, stream, block, kernels):
    rng = make_rng(seed, "pivots", *stream, block)
    member = rng.integers(0, 2, size=(rows, x.size), dtype=np.uint8)
    # totals are formed here, once, so both kernel backends see identical input
    totals = member.astype(np.float64) @ x
    return kernels.pivot_counts(x, member, totals, q_eff)


def pivot_counts_sampled(x, quotas, R: int, seed: int = 0, block_size: int = DEFAULT_BLOCK,
                         workers: int | None = 1, kernels=None,
                         stream: tuple = ()) -> np.ndarray:
    """Integer swing tallies ``(n, Q)`` over ``R`` sampled coalitions.

    The samples are split into fixed blocks, each with its own generator
    derived from ``(seed, block index)``; tallies are summed in block order,
    so the result does not depend on ``workers``.  ``stream`` extends the
    generator key so that callers can draw independent sample sets under one
    seed.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    q = np.asarray(quotas, dtype=np.float64)
    if q.ndim != 1 or q.size == 0:
        raise StakePowerError("quota grid must be a non-empty vector")
    if R < 1:
        raise StakePowerError("number of samples must be positive")
    if block_size < 1:
        raise StakePowerError("block size must be positive")
    kernels = kernels or _backend.get()
    order = np.argsort(q, kind="stable")
    q_eff = np.ascontiguousarray(q[order] - TIE_TOL)
    sizes = [block_size] * (R // block_size)
    if R % block_size:
        sizes.append(R % block_size)
    jobs = [(x, q_eff, rows, seed, tuple(stream), b, kernels) for b, rows in enumerate(sizes)]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _block_counts(*job), jobs))
    else:
        parts = [_block_counts(*job) for job in jobs]
    total = np.zeros((x.size, q.size), dtype=np.int64)
    for part in parts:
        total += part
    out = np.empty_like(total)
    out[:, order] = total
    return out


def estimate_pivots(x, quotas, R: int = 15_000, seed: int = 0,
                    block_size: int = DEFAULT_BLOCK, workers: int | None = 1,
                    kernels=None, stream: tuple = ()) -> PivotEstimate:
    """Estimate every agent's Banzhaf index at every quota from ``R`` samples.

    ``x`` is a weight profile (or anything summing to one); quotas are
    relative and may include the endpoints 0 and 1, where the estimates are
    degenerate by construction.
    """
    w = _as_weights(x)
    q = np.atleast_1d(np.asarray(quotas, dtype=float))
    if q.size and (np.any(q < 0) or np.any(q > 1)):
        raise StakePowerError("quotas must lie in [0, 1]")
    counts = pivot_counts_sampled(w.weights, q, R, seed, block_size, workers, kernels, stream)
    return PivotEstimate(counts / float(R), q.copy(), int(R), int(seed))


def normalize_power(est: PivotEstimate, quota_index: int) -> PowerProfile:
    """Power profile for one quota column; all-zero columns come back flagged."""
    if not -est.probs.shape[1] <= quota_index < est.probs.shape[1]:
        raise StakePowerError(f"quota index {quota_index} out of range")
    return PowerProfile(est.probs[:, quota_index])
