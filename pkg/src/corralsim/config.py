"""Experiment configuration: dataclasses plus a strict JSON loader.

The on-disk format is a single JSON document (schema documented in the README);
unknown keys are rejected so typos fail loudly instead of silently running a
different experiment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

import numpy as np

from . import rng as rngmod
from .bases import bound_descriptor, make_base
from .environments import (
    KArmedEnv,
    LinearContextualEnv,
    MisspecifiedLinearEnv,
    NonlinearArmsEnv,
)
from .errors import ConfigError


@dataclass
class NoiseSpec:
    kind: str = "gaussian"
    sigma: float = 1.0


@dataclass
class EnvSpec:
    kind: str
    # k_armed
    means: list[float] | None = None
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    # linear / nonlinear (drawn per repetition unless given explicitly)
    k: int | None = None
    d: int | None = None
    theta_star: list[float] | None = None
    arm_features: list[list[float]] | None = None
    action_set_mode: str = "fixed"
    noise_sigma: float = 1.0
    # nonlinear
    mu: list[float] | None = None
    mu_range: tuple[float, float] = (0.0, 10.0)
    # misspecified
    eps_star: float = 0.0
    perturbation: list[float] | None = None


@dataclass
class BaseSpec:
    kind: str
    c: float | None = None
    misspec_eps: float = 0.0
    reg_lambda: float = 1.0
    feedback_inflation: float = 0.0
    label: str | None = None

    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "egreedy":
            return f"egreedy(c={self.c:g})"
        if self.kind == "linucb" and self.misspec_eps:
            return f"linucb(eps={self.misspec_eps:g})"
        return self.kind


@dataclass
class MasterSpec:
    kind: str  # corral | exp3p | single
    eta: float | None = None
    p_explore: float | None = None
    base_index: int = 0


@dataclass
class ExperimentConfig:
    env: EnvSpec
    master: MasterSpec
    bases: list[BaseSpec]
    T: int
    n_reps: int
    seed: int
    delta: float | None = None  # None -> 1/T
    audit_term2: bool = False
    resample_replay: bool = False
    drop_test: bool = True
    modified_feedback: bool = True
    label: str = "experiment"

    def resolved_delta(self) -> float:
        return self.delta if self.delta is not None else 1.0 / self.T

    def validate(self) -> None:
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.n_reps < 1:
            raise ConfigError("n_reps must be >= 1")
        if not self.bases:
            raise ConfigError("at least one base is required")
        if self.master.kind not in ("corral", "exp3p", "single"):
            raise ConfigError(f"unknown master kind {self.master.kind!r}")
        if self.master.kind == "single" and not 0 <= self.master.base_index < len(self.bases):
            raise ConfigError("single-base master index out of range")
        if self.env.kind not in ("k_armed", "linear", "misspecified", "nonlinear"):
            raise ConfigError(f"unknown environment kind {self.env.kind!r}")
        has_features = self.env.kind != "k_armed"
        for spec in self.bases:
            if spec.kind == "linucb" and not has_features:
                raise ConfigError("linucb base needs an environment with features")
            if spec.kind in ("ucb", "egreedy", "exp3") and \
                    self.env.kind in ("linear",) and self.env.action_set_mode == "iid_resample":
                raise ConfigError(f"{spec.kind} base needs a stable arm set, "
                                  "not iid_resample action sets")
            if spec.kind == "egreedy" and (spec.c is None or spec.c <= 0):
                raise ConfigError("egreedy base needs c > 0")
        if self.env.kind == "k_armed":
            if self.env.means is None:
                raise ConfigError("k_armed environment needs means")
            if self.env.noise.kind not in ("bernoulli", "gaussian"):
                raise ConfigError(f"unknown noise kind {self.env.noise.kind!r}")
        if self.env.kind in ("linear", "misspecified", "nonlinear"):
            if self.env.arm_features is None and (self.env.k is None or self.env.d is None):
                raise ConfigError("feature environments need k and d (or explicit features)")
        if self.env.kind == "misspecified" and self.env.action_set_mode != "fixed":
            raise ConfigError("misspecified env requires fixed action sets")


def build_environment(spec: EnvSpec, rng: np.random.Generator):
    """Realize an environment instance; unpinned parameters are drawn from rng."""
    if spec.kind == "k_armed":
        return KArmedEnv(spec.means, noise=spec.noise.kind, sigma=spec.noise.sigma)
    if spec.kind in ("linear", "misspecified"):
        if spec.arm_features is not None:
            feats = np.asarray(spec.arm_features, dtype=float)
        else:
            feats = rng.random((spec.k, spec.d))
        if spec.theta_star is not None:
            theta = np.asarray(spec.theta_star, dtype=float)
        else:
            theta = rng.random(feats.shape[1])
            theta /= np.linalg.norm(theta)  # paper draws from [0,1]^d; normalized to unit norm
        base = LinearContextualEnv(theta, feats, action_set_mode=spec.action_set_mode,
                                   noise_sigma=spec.noise_sigma)
        if spec.kind == "linear":
            return base
        if spec.perturbation is not None:
            pert = np.asarray(spec.perturbation, dtype=float)
        else:
            pert = rng.uniform(-spec.eps_star, spec.eps_star, size=base.k)
        return MisspecifiedLinearEnv(base, pert, spec.eps_star)
    if spec.kind == "nonlinear":
        if spec.mu is not None:
            mu = np.asarray(spec.mu, dtype=float)
            scale = max(1.0, float(np.max(np.abs(mu))))
        else:
            lo, hi = spec.mu_range
            mu = rng.uniform(lo, hi, size=spec.k)
            scale = max(1.0, float(hi))
        if spec.arm_features is not None:
            feats = np.asarray(spec.arm_features, dtype=float)
        else:
            feats = rng.random((len(mu), spec.d))
        return NonlinearArmsEnv(mu, feats, noise_sigma=spec.noise_sigma, reward_scale=scale)
    raise ConfigError(f"unknown environment kind {spec.kind!r}")


def make_base_factory(spec: BaseSpec, k: int, d: int, delta: float):
    def factory():
        return make_base(spec.kind, k, d, delta, c=spec.c,
                         misspec_eps=spec.misspec_eps, reg_lambda=spec.reg_lambda)
    return factory


def base_bound(spec: BaseSpec, k: int, d: int, delta: float, horizon: int):
    return bound_descriptor(spec.kind, k, d, delta, horizon)


# ---------------------------------------------------------------------------
# strict dict -> dataclass parsing

def _from_dict(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return data


def parse_config(doc: dict) -> ExperimentConfig:
    data = _from_dict(ExperimentConfig, doc, "config")
    env_data = dict(_from_dict(EnvSpec, data.get("env", {}), "config.env"))
    if "noise" in env_data:
        env_data["noise"] = NoiseSpec(**_from_dict(NoiseSpec, env_data["noise"],
                                                   "config.env.noise"))
    if "mu_range" in env_data:
        env_data["mu_range"] = tuple(env_data["mu_range"])
    master = MasterSpec(**_from_dict(MasterSpec, data.get("master", {}), "config.master"))
    bases = [BaseSpec(**_from_dict(BaseSpec, b, f"config.bases[{i}]"))
             for i, b in enumerate(data.get("bases", []))]
    plain = {key: val for key, val in data.items() if key not in ("env", "master", "bases")}
    cfg = ExperimentConfig(env=EnvSpec(**env_data), master=master, bases=bases, **plain)
    cfg.validate()
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def env_dimensions(spec: EnvSpec) -> tuple[int, int]:
    """(k, d) implied by an environment spec; d = 0 for plain arm sets."""
    if spec.kind == "k_armed":
        return len(spec.means), 0
    if spec.arm_features is not None:
        feats = np.asarray(spec.arm_features)
        return feats.shape[0], feats.shape[1]
    if spec.kind == "nonlinear" and spec.mu is not None:
        return len(spec.mu), spec.d or 1
    return spec.k, spec.d


__all__ = [
    "NoiseSpec", "EnvSpec", "BaseSpec", "MasterSpec", "ExperimentConfig",
    "parse_config", "load_config", "build_environment", "make_base_factory",
    "base_bound", "env_dimensions", "rngmod",
]
