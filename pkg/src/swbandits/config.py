"""Experiment configuration: a single strict JSON document.

Top-level keys (anything else is rejected)::

    environment   environment description (see rewards.make_environment)
    horizon       optional T; fills in or must equal the environment's T
    policies      list of policy configurations (simulate)
    replications  number of episodes per policy, default 10
    seed          base seed, default 0; the BANDIT_SEED variable overrides it
    tau_list      window lengths for `sweep`
    sweep_policy  policy configuration without tau for `sweep`
    timestamp     free text copied into summary.json, default null
    log_scale     plot the regret axis on a log scale, default false
"""
from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError, ParameterError
from .policies import make_policy
from .rewards import RewardTrajectory, make_environment

__all__ = ["ExperimentConfig", "load_config", "parse_config", "SEED_ENV_VAR"]

SEED_ENV_VAR = "BANDIT_SEED"

_TOP_KEYS = {
    "environment", "horizon", "policies", "replications", "seed",
    "tau_list", "sweep_policy", "timestamp", "log_scale",
}
_ENV_KEYS = {
    "piecewise_constant": {"kind", "K", "T", "boundaries", "means", "family"},
    "crossing_sinusoid": {"kind", "T", "amplitude", "period", "center", "family"},
    "lipschitz_smooth": {"kind", "K", "T", "sigma", "delta_prime", "shape", "center", "period", "phase", "family"},
    "custom_file": {"kind", "path"},
}


@dataclass
class ExperimentConfig:
    trajectory: RewardTrajectory
    policies: list[dict] = field(default_factory=list)
    replications: int = 10
    seed: int = 0
    tau_list: list[int] = field(default_factory=list)
    sweep_policy: dict = field(default_factory=lambda: {"policy": "beta_swts"})
    timestamp: str | None = None
    log_scale: bool = False
    warnings: list[str] = field(default_factory=list)


def _require_int(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigurationError(f"{name!r} must be an integer >= {minimum}, got {value!r}")
    return value


def parse_config(doc: dict, base_dir: str | os.PathLike = ".", environ=None) -> ExperimentConfig:
    """Validate a configuration document and build the trajectory and policies."""
    if not isinstance(doc, dict):
        raise ConfigurationError("the configuration must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown configuration keys {sorted(unknown)}")
    if "environment" not in doc:
        raise ConfigurationError("missing 'environment'")
    env = doc["environment"]
    if not isinstance(env, dict):
        raise ConfigurationError("'environment' must be an object")
    kind = env.get("kind")
    if kind not in _ENV_KEYS:
        raise ConfigurationError(f"unknown environment kind {kind!r}; expected one of {sorted(_ENV_KEYS)}")
    bad = set(env) - _ENV_KEYS[kind]
    if bad:
        raise ConfigurationError(f"unknown keys for environment kind {kind!r}: {sorted(bad)}")
    fam = env.get("family")
    if isinstance(fam, dict) and set(fam) - {"family", "proxy_variance", "noise"}:
        raise ConfigurationError(f"unknown keys in environment family: {sorted(set(fam) - {'family', 'proxy_variance', 'noise'})}")
    env = dict(env)
    horizon = doc.get("horizon")
    if horizon is not None:
        _require_int("horizon", horizon, 1)
        if kind != "custom_file":
            if "T" in env and env["T"] != horizon:
                raise ConfigurationError(f"horizon {horizon} disagrees with environment T={env['T']}")
            env.setdefault("T", horizon)
    try:
        traj = make_environment(env, base_dir)
    except ParameterError as exc:
        raise ConfigurationError(f"environment: {exc}") from None
    if horizon is not None and traj.horizon != horizon:
        raise ConfigurationError(f"horizon {horizon} disagrees with trajectory length {traj.horizon}")

    cfg = ExperimentConfig(trajectory=traj)
    cfg.replications = _require_int("replications", doc.get("replications", 10), 1)
    seed = doc.get("seed", 0)
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV_VAR):
        try:
            seed = int(environ[SEED_ENV_VAR])
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV_VAR}={environ[SEED_ENV_VAR]!r} is not an integer") from None
    cfg.seed = _require_int("seed", seed, 0)
    ts = doc.get("timestamp")
    if ts is not None and not isinstance(ts, str):
        raise ConfigurationError("'timestamp' must be a string")
    cfg.timestamp = ts
    cfg.log_scale = bool(doc.get("log_scale", False))

    policies = doc.get("policies", [])
    if not isinstance(policies, list) or not all(isinstance(p, dict) for p in policies):
        raise ConfigurationError("'policies' must be a list of objects")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for p in policies:
            make_policy(p, traj)
        labels = [p.get("label") or make_policy(p, traj).label for p in policies]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"policy labels must be unique, got {labels}")
        cfg.policies = [dict(p) for p in policies]

        tau_list = doc.get("tau_list", [])
        if not isinstance(tau_list, list):
            raise ConfigurationError("'tau_list' must be a list")
        cfg.tau_list = [_require_int("tau_list entry", t, 1) for t in tau_list]
        sweep = doc.get("sweep_policy", {"policy": "beta_swts"})
        if not isinstance(sweep, dict) or "tau" in sweep:
            raise ConfigurationError("'sweep_policy' must be a policy object without 'tau'")
        for tau in cfg.tau_list:
            make_policy(dict(sweep, tau=tau), traj)
        cfg.sweep_policy = dict(sweep)
    cfg.warnings = [str(w.message) for w in caught]
    return cfg


def load_config(path: str | os.PathLike, environ=None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"configuration file not found: {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(doc, base_dir=path.parent, environ=environ)
