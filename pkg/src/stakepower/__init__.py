"""Banzhaf power imbalance analysis for stake-weighted quota voting."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .analytic import (
    AnalyticConfig,
    analytic_curve,
    conditional_banzhaf,
    expected_ratio,
    jelnov_expected_ratio,
    single_agent_variance,
)
from .errors import (
    DegenerateStakesError,
    EnumerationLimitError,
    NumericalError,
    StakeDataError,
    StakePowerError,
    ZeroStakePivotError,
)
from .experiments import (
    FixedQuotaResult,
    Mode,
    QuotaGridResult,
    Ratio,
    SingleAgentResult,
    SweepConfig,
    default_quota_grid,
    fixed_quota_distribution,
    run_sweep,
    single_agent_simulation,
)
from .games import (
    TIE_TOL,
    VWA,
    PowerProfile,
    Project,
    QuotaRule,
    StakeProfile,
    WeightProfile,
    apply_vwa,
    banzhaf_agent_grid,
    banzhaf_dp,
    banzhaf_enumerate,
    banzhaf_enumerate_grid,
    coalition_wins,
    greedy_select,
    power_stake_ratios,
    quota_stake_for,
)
from .io import RunManifest, StakeRecord, StakeTable, ingest_stakes, read_projects
from .montecarlo import PivotEstimate, estimate_pivots, normalize_power
from .stochastic import (
    GammaParams,
    StakeSummary,
    beta_density_x1,
    fit_gamma_mle,
    make_rng,
    reg_inc_beta,
    sample_dirichlet_symmetric,
    sample_gamma,
    stake_summary,
)

__all__ = [name for name in dir() if not name.startswith("_")]
