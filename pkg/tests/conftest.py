"""Shared session fixtures for the experiment-scale test suites.

The heavy Monte-Carlo runs are computed once per pytest session and reused by
both the acceptance criteria and the long-run property tests.
"""

import time

import pytest

from corralsim import run_monte_carlo
from corralsim.experiments import (
    drop_calibration_configs,
    egreedy_tuning_configs,
    rate_check_config,
    smoothing_decay_config,
    ucb_linucb_configs,
)


def _run_suite(configs, tag):
    out = {}
    t0 = time.time()
    for cfg in configs:
        t1 = time.time()
        out[cfg.label] = run_monte_carlo(cfg)
        print(f"    [{tag}] {cfg.label}: final mean "
              f"{out[cfg.label].final_mean:.1f} ({time.time() - t1:.0f}s)", flush=True)
    print(f"    [{tag}] total {time.time() - t0:.0f}s", flush=True)
    return out


@pytest.fixture(scope="session")
def egreedy_results():
    """Exploration-rate tuning at full scale: T=50000, 18 bases + master, 50 reps."""
    return _run_suite(egreedy_tuning_configs(T=50_000, n_reps=50, seed=20_240_501),
                      "egreedy")


@pytest.fixture(scope="session")
def ucb_linucb_results():
    """Model selection on linear and nonlinear rewards: T=1e4, 500 reps."""
    return {
        case: _run_suite(ucb_linucb_configs(case, T=10_000, n_reps=500,
                                            seed=20_240_502), case)
        for case in ("linear", "nonlinear")
    }


@pytest.fixture(scope="session")
def rate_check_results():
    """Master over two UCB bases, 1e5 environment steps, 100 seeds."""
    cfg = rate_check_config(T_env=100_000, n_reps=100, seed=20_240_503)
    return _run_suite([cfg], "rate")[cfg.label]


@pytest.fixture(scope="session")
def smoothing_decay_results():
    """Smoothed UCB driven every round: 5000 selections, 500 seeds."""
    cfg = smoothing_decay_config(selections=5000, n_reps=500, seed=20_240_504)
    return _run_suite([cfg], "decay")[cfg.label]


@pytest.fixture(scope="session")
def drop_calibration_results():
    """Honest and corrupted drop-test calibration runs, 200 seeds each."""
    honest, corrupted = drop_calibration_configs(seed=20_240_505, n_reps=200)
    return {
        "honest": _run_suite([honest], "drop")[honest.label],
        "corrupted": _run_suite([corrupted], "drop")[corrupted.label],
        "configs": {"honest": honest, "corrupted": corrupted},
    }
