#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback.

Each kernel is run on the same inputs with both backends; the script checks
that the outputs agree before reporting timings.

    python benchmarks/bench_kernels.py --repeat 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from stakepower import _backend
from stakepower.analytic import _GL_X, _GL_W, AnalyticConfig
from stakepower.stochastic import make_rng


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def pivot_case(n=50, R=15_000, Q=101, seed=0):
    rng = make_rng(seed, "bench")
    x = rng.dirichlet(np.ones(n))
    member = rng.integers(0, 2, size=(R, n), dtype=np.uint8)
    totals = member.astype(np.float64) @ x
    q = np.linspace(0.0, 1.0, Q) - 1e-12
    label = f"pivot_counts n={n} R={R} Q={Q}"
    return label, lambda k: k.pivot_counts(x, member, totals, q)


def cond_case(n=31, alpha=1.0, points=2_000, theta=0.4):
    cfg = AnalyticConfig(n=n, alpha=alpha)
    kw, ka, kb, lb = cfg._coalition_terms
    c = np.linspace(1e-6, 1 - 1e-6, points)
    label = f"cond_banzhaf n={n} points={points}"
    return label, lambda k: k.cond_banzhaf(c, theta, n, alpha, kw, ka, kb, lb, _GL_X, _GL_W)


def ibeta_case(size=100_000, seed=1):
    rng = make_rng(seed, "bench")
    h = rng.random(size)
    a = rng.uniform(0.2, 40, size)
    b = rng.uniform(0.2, 40, size)
    return f"ibeta size={size}", lambda k: k.ibeta(h, a, b)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    names = _backend.available()
    if "cython" not in names:
        print("compiled kernels not built; only the numpy fallback is timed")
    print(f"{'kernel':<40}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, run in (pivot_case(), cond_case(), ibeta_case()):
        times, outs = [], []
        for name in names:
            t, out = _time(lambda: run(_backend.get(name)), args.repeat)
            times.append(t)
            outs.append(np.asarray(out))
        if len(outs) == 2 and not np.allclose(outs[0], outs[1], rtol=1e-10, atol=1e-13):
            raise SystemExit(f"{label}: backends disagree")
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{label:<40}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
