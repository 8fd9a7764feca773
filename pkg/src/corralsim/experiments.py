"""Canonical experiment configurations.

These are the desk-scale setups the acceptance suite and the scripts/ runners
share: exploration-rate tuning for epsilon-greedy, UCB-vs-LinUCB model
selection on linear and nonlinear reward structures, a two-base rate check,
drop-test calibration, and the smoothing-decay measurement.

The two figure-reproduction setups disable the modified-feedback offset: with
the descriptor coefficients at these horizons the offset pins every base's
feedback at the clip boundary and no selection signal survives.  The offset
stays on (its default) everywhere else.
"""

from __future__ import annotations

import math

from .config import BaseSpec, EnvSpec, ExperimentConfig, MasterSpec, NoiseSpec
from .harness import make_geometric_grid

TWO_ARM_MEANS = (0.5, 0.45)


def _karmed_env(noise="bernoulli", sigma=1.0) -> EnvSpec:
    return EnvSpec(kind="k_armed", means=list(TWO_ARM_MEANS),
                   noise=NoiseSpec(kind=noise, sigma=sigma))


def egreedy_grid(T: int, k: int = 2) -> list[float]:
    """Exploration scales on the geometric grid [1, 2T] (18 values at T=50000)."""
    return make_geometric_grid(1.0, 2.0 * T, 2.0)


def egreedy_tuning_configs(T: int = 50_000, n_reps: int = 50, seed: int = 20_240_501,
                           ) -> list[ExperimentConfig]:
    """Two Bernoulli arms (0.5, 0.45); a grid of epsilon-greedy bases run alone
    plus the master over all of them (learning rate 20/sqrt(T))."""
    grid = egreedy_grid(T)
    bases = [BaseSpec(kind="egreedy", c=c) for c in grid]
    configs = []
    for idx, spec in enumerate(bases):
        configs.append(ExperimentConfig(
            env=_karmed_env(), master=MasterSpec(kind="single", base_index=idx),
            bases=bases, T=T, n_reps=n_reps, seed=seed,
            label=spec.name(),
        ))
    configs.append(ExperimentConfig(
        env=_karmed_env(), master=MasterSpec(kind="corral", eta=20.0 / math.sqrt(T)),
        bases=bases, T=T, n_reps=n_reps, seed=seed,
        modified_feedback=False,
        label="corral",
    ))
    return configs


def ucb_linucb_configs(case: str, T: int = 10_000, n_reps: int = 500,
                       seed: int = 20_240_502, k: int = 50, d: int = 2,
                       ) -> list[ExperimentConfig]:
    """Model selection between UCB and LinUCB, d=2, k=50 (arms fixed per rep).

    case "linear": means are inner products with a hidden unit vector, so the
    linear learner is the right model.  case "nonlinear": means are arbitrary
    draws from [0, 10] and the features are uninformative.
    """
    if case == "linear":
        env = EnvSpec(kind="linear", k=k, d=d, action_set_mode="fixed", noise_sigma=1.0)
    elif case == "nonlinear":
        env = EnvSpec(kind="nonlinear", k=k, d=d, mu_range=(0.0, 10.0), noise_sigma=1.0)
    else:
        raise ValueError(f"unknown case {case!r}")
    bases = [BaseSpec(kind="ucb"), BaseSpec(kind="linucb")]
    eta = 2.0 / (math.sqrt(T) * d)
    return [
        ExperimentConfig(env=env, master=MasterSpec(kind="single", base_index=0),
                         bases=bases, T=T, n_reps=n_reps, seed=seed, label="ucb"),
        ExperimentConfig(env=env, master=MasterSpec(kind="single", base_index=1),
                         bases=bases, T=T, n_reps=n_reps, seed=seed, label="linucb"),
        ExperimentConfig(env=env, master=MasterSpec(kind="corral", eta=eta),
                         bases=bases, T=T, n_reps=n_reps, seed=seed,
                         modified_feedback=False, label="corral"),
    ]


def rate_check_config(T_env: int = 100_000, n_reps: int = 100,
                      seed: int = 20_240_503) -> ExperimentConfig:
    """Master over two identical UCB bases on the two-arm environment; the mean
    regret curve should stay clearly sublinear."""
    T = T_env // 2
    bases = [BaseSpec(kind="ucb", label="ucb-a"), BaseSpec(kind="ucb", label="ucb-b")]
    return ExperimentConfig(
        env=_karmed_env(), master=MasterSpec(kind="corral"),
        bases=bases, T=T, n_reps=n_reps, seed=seed, label="corral-2ucb",
    )


def smoothing_decay_config(selections: int = 5000, n_reps: int = 500,
                           seed: int = 20_240_504) -> ExperimentConfig:
    """Single smoothed UCB driven every round (M=1 master pins p=[1])."""
    return ExperimentConfig(
        env=_karmed_env(), master=MasterSpec(kind="corral"),
        bases=[BaseSpec(kind="ucb")], T=selections, n_reps=n_reps, seed=seed,
        drop_test=False, label="smoothed-ucb",
    )


def drop_calibration_configs(seed: int = 20_240_505, n_reps: int = 200,
                             ) -> tuple[ExperimentConfig, ExperimentConfig]:
    """(honest, corrupted) drop-test calibration runs.

    The corrupted run inflates one base's reported step-2 reward by +0.5, a
    drift the test must catch; the honest run measures the false-drop rate.
    """
    honest = ExperimentConfig(
        env=_karmed_env(), master=MasterSpec(kind="corral"),
        bases=[BaseSpec(kind="ucb", label="ucb-a"), BaseSpec(kind="ucb", label="ucb-b")],
        T=10_000, n_reps=n_reps, seed=seed, label="drop-honest",
    )
    corrupted = ExperimentConfig(
        env=_karmed_env(), master=MasterSpec(kind="corral"),
        bases=[BaseSpec(kind="ucb", label="honest"),
               BaseSpec(kind="ucb", feedback_inflation=0.5, label="corrupted")],
        T=20_000, n_reps=n_reps, seed=seed + 1, label="drop-corrupted",
    )
    return honest, corrupted


def misspec_grid_configs(eps_star: float = 2.0, eps_cap: float = 8.0,
                         T: int = 5_000, n_reps: int = 20, seed: int = 20_240_506,
                         k: int = 20, d: int = 2) -> list[ExperimentConfig]:
    """Misspecified linear environment with a grid of width-inflation tolerances.

    One LinUCB base per grid value of eps in [1, eps_cap]; the master adapts to
    the unknown misspecification level.
    """
    env = EnvSpec(kind="misspecified", k=k, d=d, eps_star=eps_star,
                  action_set_mode="fixed", noise_sigma=1.0)
    grid = make_geometric_grid(1.0, eps_cap, 2.0)
    bases = [BaseSpec(kind="linucb", misspec_eps=eps) for eps in grid]
    configs = [
        ExperimentConfig(env=env, master=MasterSpec(kind="single", base_index=i),
                         bases=bases, T=T, n_reps=n_reps, seed=seed, label=spec.name())
        for i, spec in enumerate(bases)
    ]
    configs.append(ExperimentConfig(
        env=env, master=MasterSpec(kind="corral", eta=1.0 / (math.sqrt(T) * d)),
        bases=bases, T=T, n_reps=n_reps, seed=seed, label="corral",
    ))
    return configs
