"""Bandit model-selection simulator.

Smoothed stochastic base algorithms (UCB, LinUCB, epsilon-greedy, EXP3) under
two master algorithms (CORRAL with log-barrier mirror descent, EXP3.P), with
synthetic environments and a reproducible Monte-Carlo harness.
"""

from .bases import BoundDescriptor, bound_descriptor, make_base
from .config import (
    BaseSpec,
    EnvSpec,
    ExperimentConfig,
    MasterSpec,
    NoiseSpec,
    build_environment,
    load_config,
    parse_config,
)
from .corral import CorralState, corral_update, init_corral, log_barrier_omd, sample_base
from .environments import (
    ActionSet,
    KArmedEnv,
    LinearContextualEnv,
    MisspecifiedLinearEnv,
    NonlinearArmsEnv,
    per_step_optimum,
)
from .errors import ConfigError, InvariantViolation
from .exp3p import Exp3pState, default_p_explore, exp3p_update, init_exp3p
from .harness import (
    AggregateStats,
    RunRecord,
    make_geometric_grid,
    pseudo_regret,
    run_monte_carlo,
    run_once,
    sublinearity_slope,
    write_summary_csv,
    write_trace_csv,
)
from .smoothing import SmoothedBase, to_master_reward

__version__ = "0.1.0"
