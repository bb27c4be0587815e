"""Built-in cross-validation suites run by ``stakepower verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import AnalyticConfig, expected_ratio, jelnov_expected_ratio, single_agent_variance
from .experiments import Mode, Ratio, SweepConfig, run_sweep, single_agent_simulation
from .games import VWA, apply_vwa, banzhaf_enumerate

EXAMPLE_STAKES = (10, 90, 100, 200, 600)
SPLIT_STAKES = (10, 90, 100, 200, 300, 300)
EXAMPLE_PROFILES = (
    (0.32, 0.32, 0.31, 0.04, 0.01),
    (0.20, 0.20, 0.44, 0.01, 0.15),
    (0.02, 0.24, 0.38, 0.09, 0.27),
    (0.08, 0.05, 0.17, 0.48, 0.22),
    (0.24, 0.04, 0.35, 0.24, 0.13),
)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: float
    tolerance: float
    relative: bool = False

    @property
    def deviation(self) -> float:
        d = abs(self.measured - self.expected)
        return d / abs(self.expected) if self.relative else d

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)

    def line(self) -> str:
        kind = "rel" if self.relative else "abs"
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name}: measured={self.measured:.6g} expected={self.expected:.6g} "
            f"{kind}_dev={self.deviation:.3g} tol={self.tolerance:g}"
        )


def example1() -> list[Check]:
    cases = [
        ("linear", EXAMPLE_STAKES, VWA.LINEAR, (0, 0, 0, 0, 1)),
        ("penrose", EXAMPLE_STAKES, VWA.PENROSE, (0, 0.25, 0.25, 0.25, 0.75)),
        ("penrose split", SPLIT_STAKES, VWA.PENROSE,
         (0.0625, 0.3125, 0.3125, 0.3125, 0.4375, 0.4375)),
    ]
    out = []
    for label, stakes, vwa, expected in cases:
        raw = banzhaf_enumerate(apply_vwa(stakes, vwa), 0.5).raw
        for i, (got, want) in enumerate(zip(raw, expected)):
            out.append(Check(f"{label} agent {i + 1}", float(got), float(want), 0.0))
    return out


def example2() -> list[Check]:
    cfg = SweepConfig(n=5, alpha=1.0, quotas=[0.5], mode=Mode.EXACT, ratio=Ratio.RAW,
                      profiles=EXAMPLE_PROFILES)
    res = run_sweep(cfg)
    agent1 = single_agent_simulation(5, 1.0, [0.5], profiles=EXAMPLE_PROFILES, ddof=0)
    return [
        Check("variance of first ratio profile", float(res.per_profile_var[0, 0]), 0.60, 0.02),
        Check("within-vector variance", float(res.within_var[0]), 0.54, 0.05),
        Check("agent-1 single-agent variance", float(agent1.variance[0]), 0.36, 0.05),
    ]


def corollary(ns=(5, 11, 31)) -> list[Check]:
    out = []
    for n in ns:
        cfg = AnalyticConfig(n=n, alpha=1.0)
        out.append(Check(f"majority expected ratio n={n}", expected_ratio(0.5, cfg),
                         jelnov_expected_ratio(n), 1e-6))
    return out


def appendix_a1(n: int = 31, alpha: float = 1.0, quotas=(0.3, 0.4, 0.6, 0.7),
                repetitions: int = 50, profiles_per_point: int = 20, seed: int = 0,
                tolerance: float = 0.15) -> list[Check]:
    cfg = AnalyticConfig(n=n, alpha=alpha)
    sim = single_agent_simulation(n, alpha, quotas, profiles_per_point, seed, repetitions)
    out = []
    for j, t in enumerate(quotas):
        out.append(Check(f"single-agent variance theta={t:g}", single_agent_variance(t, cfg),
                         float(sim.variance[j]), tolerance, relative=True))
    for j, t in enumerate(quotas):
        out.append(Check(f"expected ratio theta={t:g}", expected_ratio(t, cfg),
                         float(sim.mean_ratio[j]), tolerance, relative=True))
    return out


SUITES = {
    "example1": example1,
    "example2": example2,
    "corollary": corollary,
    "appendix-a1": appendix_a1,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()


def max_deviation(checks) -> float:
    return float(np.max([c.deviation for c in checks])) if checks else 0.0
