"""Experiment orchestration: the master/base event loop, pseudo-regret
accounting, Monte-Carlo aggregation, and CSV persistence.

One master round is two environment steps (the smoothing wrapper's step 1 and
step 2), both played by the selected base; regret is accounted over all 2T
environment steps.  Baselines driven by the ``single`` master run the raw,
unwrapped base for the same 2T steps so curves are comparable.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .config import (
    ExperimentConfig,
    base_bound,
    build_environment,
    make_base_factory,
)
from .corral import (
    CorralState,
    corral_update,
    init_corral,
    restart_cap,
    sample_base,
)
from .errors import ConfigError, InvariantViolation
from .exp3p import Exp3pState, default_p_explore, exp3p_update, init_exp3p
from .smoothing import SmoothedBase, to_master_reward

TRACE_COLUMNS = ["rep", "master_round", "env_step", "step_kind", "base_id",
                 "action_id", "reward", "mean_reward", "step_optimum",
                 "cum_pseudo_regret"]
SUMMARY_COLUMNS = ["label", "checkpoint_step", "mean_regret", "std_regret"]


def make_geometric_grid(lo: float, hi: float, factor: float) -> list[float]:
    """[lo, lo*f, lo*f^2, ...] up to and including the first value >= hi."""
    if factor <= 1.0:
        raise ConfigError(f"grid factor must exceed 1, got {factor}")
    if not 0.0 < lo <= hi:
        raise ConfigError(f"need 0 < lo <= hi, got lo={lo}, hi={hi}")
    grid = [float(lo)]
    i = 0
    while grid[-1] < hi:
        i += 1
        grid.append(float(lo * factor ** i))
    return grid


def pseudo_regret(step_optima, chosen_means) -> np.ndarray:
    """Cumulative per-step (optimal mean - chosen mean); never touches noise."""
    gaps = np.asarray(step_optima, dtype=float) - np.asarray(chosen_means, dtype=float)
    if np.any(gaps < -1e-9):
        raise InvariantViolation("negative per-step pseudo-regret")
    return np.cumsum(gaps)


def sublinearity_slope(series, steps=None, burn_frac: float = 0.1) -> float:
    """Least-squares slope of log(regret) vs log(step) after a 10% burn-in."""
    series = np.asarray(series, dtype=float)
    if steps is None:
        steps = np.arange(1, len(series) + 1, dtype=float)
    else:
        steps = np.asarray(steps, dtype=float)
    cut = int(math.floor(burn_frac * len(series)))
    y = series[cut:]
    x = steps[cut:]
    if np.any(y <= 0.0):
        raise ValueError("regret series must be positive after burn-in")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@dataclass
class RunRecord:
    """Everything one repetition produces."""

    rep: int
    checkpoint_steps: np.ndarray          # env-step positions
    checkpoint_regret: np.ndarray
    final_regret: float
    selection_counts: np.ndarray
    restart_counts: np.ndarray
    restart_events: list = field(default_factory=list)   # (master_round, base)
    drop_events: list = field(default_factory=list)      # (master_round, base, p_at_drop)
    step2_gaps: np.ndarray | None = None                 # per master round
    final_p: np.ndarray | None = None
    p_at_drop: dict = field(default_factory=dict)
    trace: list | None = None                            # TRACE_COLUMNS tuples
    audit: list | None = None


def _checkpoint_rounds(T: int) -> np.ndarray:
    cad = max(1, T // 100)
    rounds = np.arange(cad, T + 1, cad)
    if rounds[-1] != T:
        rounds = np.append(rounds, T)
    return rounds


def _master_probs(master) -> np.ndarray:
    return master.p if isinstance(master, CorralState) else master.probs


def run_once(config: ExperimentConfig, rep: int = 0, collect_trace: bool = False) -> RunRecord:
    """One deterministic repetition of the configured experiment."""
    config.validate()
    delta = config.resolved_delta()
    env = build_environment(config.env, rngmod.stream(config.seed, rep, rngmod.ENV_BUILD))
    k = env.k
    d = getattr(env, "d", 0)

    if config.master.kind == "single":
        return _run_baseline(config, rep, env, k, d, delta, collect_trace)
    return _run_master(config, rep, env, k, d, delta, collect_trace)


def _run_master(config, rep, env, k, d, delta, collect_trace):
    T = config.T
    m = len(config.bases)
    bases = []
    for spec in config.bases:
        factory = make_base_factory(spec, k, d, delta)
        bound = base_bound(spec, k, d, delta, T)
        bases.append(SmoothedBase(
            factory, bound, k,
            apply_offset=config.modified_feedback,
            resample_replay=config.resample_replay,
            feedback_inflation=spec.feedback_inflation,
        ))

    if config.master.kind == "corral":
        master = init_corral(m, T, config.master.eta)
        cap = restart_cap(T, m)
    else:
        alpha = max(b.bound.alpha for b in bases)
        p_exp = config.master.p_explore
        if p_exp is None:
            p_exp = default_p_explore(T, m, alpha)
        master = init_exp3p(m, p_exp)
        cap = None

    master_rng = rngmod.stream(config.seed, rep, rngmod.MASTER)
    base_rngs = [rngmod.stream(config.seed, rep, rngmod.BASE_PLAY, j) for j in range(m)]
    audit_rngs = None
    if config.audit_term2:
        audit_rngs = [rngmod.stream(config.seed, rep, rngmod.BASE_AUDIT, j) for j in range(m)]

    check_rounds = _checkpoint_rounds(T)
    check_regret = np.empty(len(check_rounds))
    next_check = 0
    selection_counts = np.zeros(m, dtype=np.int64)
    restart_events: list = []
    drop_events: list = []
    p_at_drop: dict = {}
    step2_gaps = np.empty(T)
    trace = [] if collect_trace else None
    audit = [] if config.audit_term2 else None

    cum = 0.0
    env_step = 0
    for t in range(1, T + 1):
        i = sample_base(master, master_rng)
        selection_counts[i] += 1
        if bases[i].dropped:
            outs = bases[i].frozen_round(env, base_rngs[i])
            feedback = 0.0
        else:
            modified, outs = bases[i].selected_round(env, base_rngs[i])
            feedback = to_master_reward(modified, config.modified_feedback)

        for out in outs:
            env_step += 1
            cum += out.gap
            if trace is not None:
                trace.append((rep, t, env_step, out.step_kind, i, out.action,
                              out.reward, out.mean_reward, out.step_optimum, cum))
        step2_gaps[t - 1] = outs[1].gap

        if isinstance(master, CorralState):
            restarts = corral_update(master, i, 1.0 - feedback)
            for j in restarts:
                bases[j].restart()
                restart_events.append((t, j))
            if restarts and np.any(master.restart_counts > cap):
                raise InvariantViolation(
                    f"restart count exceeded cap {cap}: {master.restart_counts}")
        else:
            exp3p_update(master, i, feedback)

        if config.drop_test and not bases[i].dropped and bases[i].base_test(T, m, delta):
            bases[i].mark_dropped()
            p_now = _master_probs(master).copy()
            drop_events.append((t, i, float(p_now[i])))
            p_at_drop[i] = float(p_now[i])

        if audit_rngs is not None:
            for j in range(m):
                if j != i:
                    for out in bases[j].idle_round(env, audit_rngs[j]):
                        audit.append((rep, t, j, out.step_kind, out.action,
                                      out.mean_reward, out.step_optimum, out.gap))

        if next_check < len(check_rounds) and t == check_rounds[next_check]:
            check_regret[next_check] = cum
            next_check += 1

    return RunRecord(
        rep=rep,
        checkpoint_steps=check_rounds * 2,
        checkpoint_regret=check_regret,
        final_regret=cum,
        selection_counts=selection_counts,
        restart_counts=(master.restart_counts.copy()
                        if isinstance(master, CorralState) else np.zeros(m, dtype=np.int64)),
        restart_events=restart_events,
        drop_events=drop_events,
        step2_gaps=step2_gaps,
        final_p=_master_probs(master).copy(),
        p_at_drop=p_at_drop,
        trace=trace,
        audit=audit,
    )


def _run_baseline(config, rep, env, k, d, delta, collect_trace):
    """Raw (unsmoothed) base over 2T environment steps."""
    T = config.T
    spec = config.bases[config.master.base_index]
    base = make_base_factory(spec, k, d, delta)()
    rng = rngmod.stream(config.seed, rep, rngmod.BASE_PLAY, config.master.base_index)

    check_rounds = _checkpoint_rounds(T)
    check_steps = check_rounds * 2
    check_regret = np.empty(len(check_rounds))
    next_check = 0
    trace = [] if collect_trace else None

    cum = 0.0
    for step in range(1, 2 * T + 1):
        aset = env.sample_action_set(rng)
        action = base.act(aset, rng)
        reward = env.draw_reward(aset, action, rng)
        base.observe(aset, action, reward)
        mean = float(env.mean_rewards(aset)[action])
        opt = env.per_step_optimum(aset)
        cum += opt - mean
        if trace is not None:
            trace.append((rep, (step + 1) // 2, step, 1 + (step - 1) % 2,
                          config.master.base_index, action, reward, mean, opt, cum))
        if next_check < len(check_steps) and step == check_steps[next_check]:
            check_regret[next_check] = cum
            next_check += 1

    m = len(config.bases)
    return RunRecord(
        rep=rep,
        checkpoint_steps=check_steps,
        checkpoint_regret=check_regret,
        final_regret=cum,
        selection_counts=np.bincount([config.master.base_index], minlength=m) * 2 * T,
        restart_counts=np.zeros(m, dtype=np.int64),
        trace=trace,
    )


@dataclass
class AggregateStats:
    label: str
    checkpoint_steps: np.ndarray
    mean_regret: np.ndarray
    std_regret: np.ndarray
    final_regrets: np.ndarray
    records: list

    @property
    def final_mean(self) -> float:
        return float(np.mean(self.final_regrets))

    def final_quantiles(self, qs=(0.0, 0.25, 0.5, 0.75, 1.0)) -> dict:
        vals = np.quantile(self.final_regrets, qs)
        return {float(q): float(v) for q, v in zip(qs, vals)}


def _run_rep(args):
    config, rep, collect_trace = args
    return run_once(config, rep, collect_trace)


def run_monte_carlo(config: ExperimentConfig, n_jobs: int | None = None,
                    collect_trace: bool = False) -> AggregateStats:
    """n_reps independent repetitions, aggregated at the checkpoint cadence.

    Repetitions are embarrassingly parallel (each owns its environment, bases
    and master); aggregation is a rep-ordered reduce, so results do not depend
    on scheduling.
    """
    config.validate()
    jobs = [(config, rep, collect_trace) for rep in range(config.n_reps)]
    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    if n_jobs > 1 and config.n_reps > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(_run_rep, jobs, chunksize=max(1, len(jobs) // (4 * n_jobs))))
    else:
        records = [_run_rep(job) for job in jobs]

    curves = np.stack([r.checkpoint_regret for r in records])
    finals = np.array([r.final_regret for r in records])
    stats = AggregateStats(
        label=config.label,
        checkpoint_steps=records[0].checkpoint_steps,
        mean_regret=curves.mean(axis=0),
        std_regret=curves.std(axis=0),
        final_regrets=finals,
        records=records,
    )
    if not (finals.min() - 1e-9 <= stats.final_mean <= finals.max() + 1e-9):
        raise InvariantViolation("aggregate mean outside per-rep range")
    return stats


def write_trace_csv(path: str, records: list) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for record in records:
                if record.trace is None:
                    raise InvariantViolation("trace rows were not collected for this run")
                for row in record.trace:
                    writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    except OSError as exc:
        raise InvariantViolation(f"cannot write trace CSV {path}: {exc}") from exc


def write_summary_csv(path: str, stats_list: list[AggregateStats]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for stats in stats_list:
                for step, mean, std in zip(stats.checkpoint_steps,
                                           stats.mean_regret, stats.std_regret):
                    writer.writerow([stats.label, int(step), repr(float(mean)),
                                     repr(float(std))])
    except OSError as exc:
        raise InvariantViolation(f"cannot write summary CSV {path}: {exc}") from exc


def write_audit_csv(path: str, records: list) -> None:
    cols = ["rep", "master_round", "base_id", "step_kind", "action_id",
            "mean_reward", "step_optimum", "gap"]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for record in records:
                for row in record.audit or ():
                    writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    except OSError as exc:
        raise InvariantViolation(f"cannot write audit CSV {path}: {exc}") from exc
