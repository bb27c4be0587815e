"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure (a
``verify`` suite with failing checks also exits with 3).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .analytic import AnalyticConfig, analytic_curve
from .errors import NumericalError, StakeDataError, StakePowerError
from .experiments import (
    Mode,
    Ratio,
    SweepConfig,
    default_quota_grid,
    fixed_quota_distribution,
    run_sweep,
)
from .games import (
    VWA,
    QuotaRule,
    apply_vwa,
    banzhaf_dp,
    banzhaf_enumerate,
    greedy_select,
    power_stake_ratios,
    quota_stake_for,
)
from .io import RunManifest, emit, ingest_stakes, read_projects, render_csv
from .montecarlo import estimate_pivots, normalize_power
from .stochastic import fit_gamma_mle, gamma_log_likelihood, stake_summary
from .verification import SUITES, run_suite

SEED_ENV = "STAKEPOWER_SEED"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("stakepower")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _manifest(args, sub: str) -> RunManifest:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "verbose")}
    return RunManifest(sub, params, getattr(args, "seed", None), __version__)


# --- subcommands -----------------------------------------------------------


def cmd_summarize(args) -> int:
    table = ingest_stakes(args.stakes, args.min_stake)
    s = stake_summary(table.stakes)
    text = render_csv(["count", "min", "median", "mean", "max"],
                      [[s.count, s.min, s.median, s.mean, s.max]])
    emit(text, args.out, _manifest(args, "summarize"))
    if table.dropped:
        print(f"dropped {table.dropped} rows", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    table = ingest_stakes(args.stakes, args.min_stake)
    params = fit_gamma_mle(table.stakes)
    ll = gamma_log_likelihood(table.stakes, params)
    text = "".join(f"{k}={v}\n" for k, v in (
        ("alpha", "%.12g" % params.alpha),
        ("beta", "%.12g" % params.beta),
        ("n", len(table)),
        ("log_likelihood", "%.12g" % ll),
    ))
    emit(text, args.out, _manifest(args, "fit"))
    return EXIT_OK


def cmd_banzhaf(args) -> int:
    if args.stakes:
        table = ingest_stakes(args.stakes)
        labels = [r.address for r in table]
        stakes = table.stakes
    else:
        stakes = np.asarray(args.weights, dtype=float)
        labels = [str(i) for i in range(stakes.size)]
    QuotaRule(args.theta)  # validates 0 < theta < 1
    vwa = VWA(args.vwa)
    w = apply_vwa(stakes, vwa)
    if args.method == "dp":
        if vwa is not VWA.LINEAR:
            raise UsageError("--method dp needs linear weights (Penrose weights are not integers)")
        if not np.all(np.equal(np.mod(stakes, 1), 0)):
            raise UsageError("--method dp needs integer stakes")
        ints = [int(s) for s in stakes]
        power = banzhaf_dp(ints, quota_stake_for(args.theta, ints))
    elif args.method == "enum":
        power = banzhaf_enumerate(w, args.theta)
    else:
        est = estimate_pivots(w, [args.theta], args.samples, args.seed, workers=args.workers)
        power = normalize_power(est, 0)
    raw_ratio = power_stake_ratios(power, w, normalized=False)
    norm_ratio = power_stake_ratios(power, w, normalized=True)
    rows = [
        [lab, s, x, b, bn, r, rn]
        for lab, s, x, b, bn, r, rn in zip(labels, stakes, w.weights, power.raw,
                                           power.normalized, raw_ratio, norm_ratio)
    ]
    header = ["agent", "stake", "weight", "banzhaf_raw", "banzhaf_normalized",
              "ratio_raw", "ratio_normalized"]
    emit(render_csv(header, rows), args.out, _manifest(args, "banzhaf"))
    return EXIT_OK


def cmd_analytic(args) -> int:
    if args.theta is not None:
        thetas = np.asarray(args.theta, dtype=float)
    else:
        if args.quota_grid < 1:
            raise UsageError("--quota-grid needs at least one point")
        thetas = np.linspace(0.0, 1.0, args.quota_grid + 2)[1:-1]
    if np.any(thetas <= 0) or np.any(thetas >= 1):
        raise UsageError("analytic quotas must lie strictly inside (0, 1)")
    cfg = AnalyticConfig(n=args.n, alpha=args.alpha, quad_abs_tol=args.tol)
    mean, var = analytic_curve(thetas, cfg)
    text = render_csv(["theta", "expected_ratio", "single_agent_variance"],
                      zip(thetas, mean, var))
    emit(text, args.out, _manifest(args, "analytic"))
    return EXIT_OK


def _sweep_config(args, quotas) -> SweepConfig:
    return SweepConfig(n=args.n, alpha=args.alpha, M=args.m, R=args.samples, quotas=quotas,
                       seed=args.seed, mode=Mode(args.mode), ratio=Ratio(args.ratio),
                       workers=args.workers)


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args, default_quota_grid(args.grid))
    res = run_sweep(cfg, keep_per_profile=False)
    endpoint = (res.quotas <= 0) | (res.quotas >= 1)
    flag = endpoint | (res.degenerate > 0)
    rows = zip(res.quotas, res.mean_ratio, res.within_var, flag, res.degenerate)
    header = ["theta", "mean_ratio", "within_var", "degenerate", "degenerate_profiles"]
    emit(render_csv(header, rows), args.out, _manifest(args, "sweep"))
    return EXIT_OK


def cmd_fixed_quota(args) -> int:
    cfg = _sweep_config(args, [args.theta])
    res = fixed_quota_distribution(cfg, args.theta)
    rows = zip(range(cfg.M), res.mean_ratio, res.within_var, res.degenerate)
    header = ["profile", "mean_ratio", "within_var", "degenerate"]
    emit(render_csv(header, rows), args.out, _manifest(args, "fixed-quota"))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{args.suite}: {len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def cmd_pb_select(args) -> int:
    table = ingest_stakes(args.stakes)
    projects = read_projects(args.projects, len(table))
    chosen = greedy_select(projects, table.stakes, args.budget, args.seed)
    by_id = {p.id: p for p in projects}
    rows = [
        [rank, pid, by_id[pid].cost, by_id[pid].score(table.stakes)]
        for rank, pid in enumerate(chosen, start=1)
    ]
    emit(render_csv(["rank", "id", "cost", "score"], rows), args.out,
         _manifest(args, "pb-select"))
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    p = _Parser(prog="stakepower", description="Power imbalance analysis for "
                "stake-weighted quota voting.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True, workers=False):
        sp.add_argument("--out", help="output file (default: stdout); a manifest is "
                        "written next to it")
        if seed:
            sp.add_argument("--seed", type=int, default=default_seed,
                            help=f"random seed (default: ${SEED_ENV} or 0)")
        if workers:
            sp.add_argument("--workers", type=int, default=1, help="worker threads")

    sp = sub.add_parser("summarize", help="count/min/median/mean/max of a stake file")
    sp.add_argument("--stakes", required=True)
    sp.add_argument("--min-stake", type=float)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_summarize)

    sp = sub.add_parser("fit", help="Gamma maximum-likelihood fit of a stake file")
    sp.add_argument("--stakes", required=True)
    sp.add_argument("--min-stake", type=float)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("banzhaf", help="Banzhaf indices and power-stake ratios")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--stakes", help="address,stake CSV")
    src.add_argument("--weights", type=_float_list, help="comma-separated stakes")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--vwa", choices=[v.value for v in VWA], default="linear")
    sp.add_argument("--method", choices=["enum", "dp", "mc"], default="enum")
    sp.add_argument("--samples", type=int, default=15_000)
    common(sp, workers=True)
    sp.set_defaults(func=cmd_banzhaf)

    sp = sub.add_parser("analytic", help="expected ratio and single-agent variance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    grid = sp.add_mutually_exclusive_group(required=True)
    grid.add_argument("--quota-grid", type=int, metavar="Q",
                      help="Q evenly spaced interior quotas")
    grid.add_argument("--theta", type=float, action="append")
    sp.add_argument("--tol", type=float, default=1e-9, help="quadrature tolerance")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_analytic)

    for name, func, helptext in (
        ("sweep", cmd_sweep, "mean ratio and within-vector variance over a quota grid"),
        ("fixed-quota", cmd_fixed_quota, "per-profile statistics at one quota"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--m", type=int, default=100, help="profiles (default 100)")
        sp.add_argument("--samples", type=int, default=15_000, help="coalition samples")
        sp.add_argument("--mode", choices=[m.value for m in Mode], default="montecarlo")
        sp.add_argument("--ratio", choices=[r.value for r in Ratio], default="normalized")
        if name == "sweep":
            sp.add_argument("--grid", type=int, default=101, help="quota points in [0, 1]")
        else:
            sp.add_argument("--theta", type=float, default=0.07)
        common(sp, workers=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("verify", help="run a built-in cross-validation suite")
    sp.add_argument("--suite", choices=sorted(SUITES), required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("pb-select", help="greedy approval project selection")
    sp.add_argument("--projects", required=True)
    sp.add_argument("--stakes", required=True)
    sp.add_argument("--budget", type=float, required=True)
    common(sp)
    sp.set_defaults(func=cmd_pb_select)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser(_default_seed()).parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stakepower {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StakeDataError as exc:
        print(f"stakepower {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"stakepower {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StakePowerError as exc:
        print(f"stakepower {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
