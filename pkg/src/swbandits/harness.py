"""Seeded episodes, Monte-Carlo replications and window-length sweeps.

Regret is pseudo-regret: the gap between the best mean and the mean of the
pulled arm, summed over rounds.  Realised rewards only drive the policy.

Seeding: episode ``k`` of a replication run with base seed ``s`` draws its
policy randomness from ``RngStream(s, k, "policy")`` and its reward noise
from ``RngStream(s, k, "env")``.  The noise stream does not depend on the
policy, so two policies run with the same base seed face the same reward
realisations (common random numbers).
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np

from .distributions import RngStream, derive_seed
from .policies import Policy, make_policy
from .rewards import RewardTrajectory

__all__ = [
    "EpisodeRecord",
    "Aggregate",
    "SweepRow",
    "run_episode",
    "dynamic_regret",
    "run_replications",
    "tau_sweep",
    "config_fingerprint",
    "decimation_step",
    "regret_csv_text",
    "sweep_csv_text",
]


@dataclass
class EpisodeRecord:
    seed: int
    episode: int
    n_arms: int
    arms: np.ndarray
    rewards: np.ndarray
    instant_regret: np.ndarray
    suboptimal_pulls: np.ndarray

    @property
    def horizon(self) -> int:
        return self.arms.size

    @property
    def cumulative_regret(self) -> np.ndarray:
        return np.cumsum(self.instant_regret)

    @property
    def pulls(self) -> np.ndarray:
        return np.bincount(self.arms, minlength=self.n_arms)


def _reward_fn(traj: RewardTrajectory):
    fam = traj.family
    if fam.is_bernoulli:
        return lambda mu, u: 1.0 if u < mu else 0.0
    return traj.realize


def run_episode(
    policy_config: dict | Policy,
    traj: RewardTrajectory,
    seed: int,
    episode: int = 0,
) -> EpisodeRecord:
    """Play one episode of ``traj.horizon`` rounds.

    ``policy_config`` is a policy configuration dict (validated before the
    first round) or a :class:`Policy` instance, which is reset first.
    """
    if isinstance(policy_config, Policy):
        policy = policy_config
        policy.reset()
    else:
        policy = make_policy(policy_config, traj)
    rng_policy = RngStream(seed, episode, "policy")
    rng_env = RngStream(seed, episode, "env")
    T = traj.horizon
    noise = traj.draw_noise(rng_env).tolist()
    rows = traj.means.T.tolist()
    reward = _reward_fn(traj)
    select, observe = policy.select, policy.observe
    arms = [0] * T
    rewards = [0.0] * T
    for t in range(1, T + 1):
        arm = select(t, rng_policy)
        r = reward(rows[t - 1][arm], noise[t - 1])
        observe(t, arm, r)
        arms[t - 1] = arm
        rewards[t - 1] = r
    arms_arr = np.asarray(arms, dtype=np.int64)
    idx = np.arange(T)
    opt = traj.optimal_arms()
    inst = traj.means[opt, idx] - traj.means[arms_arr, idx]
    sub = np.bincount(arms_arr[arms_arr != opt], minlength=traj.n_arms)
    return EpisodeRecord(seed, episode, traj.n_arms, arms_arr, np.asarray(rewards), inst, sub)


def dynamic_regret(record: EpisodeRecord, traj: RewardTrajectory) -> np.ndarray:
    """Cumulative pseudo-regret of a recorded pull sequence on ``traj``."""
    if record.horizon != traj.horizon:
        raise ValueError("record and trajectory horizons differ")
    idx = np.arange(traj.horizon)
    gaps = traj.optimal_means() - traj.means[record.arms, idx]
    return np.cumsum(gaps)


def config_fingerprint(policy_config: dict, traj: RewardTrajectory, n: int, base_seed: int) -> str:
    payload = json.dumps(
        {"policy": policy_config, "trajectory": traj.fingerprint(), "n": int(n), "base_seed": int(base_seed)},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class Aggregate:
    label: str
    policy_config: dict
    n: int
    mean_regret: np.ndarray
    stderr: np.ndarray
    mean_pulls: np.ndarray
    mean_suboptimal_pulls: np.ndarray
    arm_frequency: np.ndarray
    final_regrets: np.ndarray
    fingerprint: str

    @property
    def final_regret(self) -> float:
        return float(self.mean_regret[-1])

    @property
    def final_stderr(self) -> float:
        return float(self.stderr[-1])

    def summary(self) -> dict:
        return {
            "label": self.label,
            "policy": self.policy_config,
            "replications": self.n,
            "final_regret": self.final_regret,
            "final_stderr": self.final_stderr,
            "mean_pulls": [float(x) for x in self.mean_pulls],
            "mean_suboptimal_pulls": [float(x) for x in self.mean_suboptimal_pulls],
            "fingerprint": self.fingerprint,
        }


def _policy_label(policy_config: dict | Policy, traj: RewardTrajectory) -> str:
    if isinstance(policy_config, Policy):
        return policy_config.label
    if "label" in policy_config:
        return str(policy_config["label"])
    return make_policy(policy_config, traj).label


def run_replications(
    policy_config: dict,
    traj: RewardTrajectory,
    n: int,
    base_seed: int,
    jobs: int = 1,
) -> Aggregate:
    """Average ``n`` independent episodes.

    Episodes may run in ``jobs`` worker processes; they are folded into the
    running mean and variance in episode order, so the result does not
    depend on scheduling.
    """
    if n < 1:
        raise ValueError("need at least one replication")
    label = _policy_label(policy_config, traj)
    T, K = traj.horizon, traj.n_arms
    mean = np.zeros(T)
    m2 = np.zeros(T)
    freq = np.zeros((K, T))
    pulls = np.zeros(K)
    sub = np.zeros(K)
    finals = np.empty(n)
    idx = np.arange(T)
    run = partial(run_episode, policy_config, traj, base_seed)
    if jobs > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = pool.map(run, range(n), chunksize=max(1, n // (4 * jobs)))
            for k, rec in enumerate(records):
                _fold(k, rec, mean, m2, freq, pulls, sub, finals, idx)
    else:
        for k in range(n):
            _fold(k, run(k), mean, m2, freq, pulls, sub, finals, idx)
    stderr = np.sqrt(m2 / (n - 1) / n) if n > 1 else np.zeros(T)
    return Aggregate(
        label=label,
        policy_config=dict(policy_config),
        n=n,
        mean_regret=mean,
        stderr=stderr,
        mean_pulls=pulls / n,
        mean_suboptimal_pulls=sub / n,
        arm_frequency=freq / n,
        final_regrets=finals,
        fingerprint=config_fingerprint(dict(policy_config), traj, n, base_seed),
    )


def _fold(k, rec, mean, m2, freq, pulls, sub, finals, idx) -> None:
    curve = rec.cumulative_regret
    delta = curve - mean
    mean += delta / (k + 1)
    m2 += delta * (curve - mean)
    freq[rec.arms, idx] += 1.0
    pulls += rec.pulls
    sub += rec.suboptimal_pulls
    finals[k] = curve[-1]


@dataclass
class SweepRow:
    tau: int
    final_regret: float
    stderr: float
    mean_pulls: np.ndarray
    aggregate: Aggregate = field(repr=False)


def tau_sweep(
    policy_family: dict,
    traj: RewardTrajectory,
    tau_list: Sequence[int],
    n: int,
    base_seed: int,
    jobs: int = 1,
) -> list[SweepRow]:
    """One :func:`run_replications` per window length.

    Each row's base seed is derived from ``(base_seed, tau)``, so rows are
    independent and reordering ``tau_list`` leaves every row unchanged.
    """
    rows = []
    for tau in tau_list:
        cfg = dict(policy_family, tau=int(tau))
        cfg.pop("label", None)
        agg = run_replications(cfg, traj, n, derive_seed(base_seed, "tau", int(tau)), jobs=jobs)
        rows.append(SweepRow(int(tau), agg.final_regret, agg.final_stderr, agg.mean_pulls, agg))
    return rows


def decimation_step(T: int, max_points: int = 2048) -> int:
    return max(1, math.ceil(T / max_points))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def regret_csv_text(aggs: Aggregate | Sequence[Aggregate], decimate: bool = True) -> str:
    """Long-format ``policy,round,mean_regret,stderr`` rows.

    Rows are kept every ``ceil(T/2048)``-th round plus the last round.
    """
    if isinstance(aggs, Aggregate):
        aggs = [aggs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["policy", "round", "mean_regret", "stderr"])
    for agg in aggs:
        T = agg.mean_regret.size
        step = decimation_step(T) if decimate else 1
        rounds = list(range(1, T + 1, step))
        if rounds[-1] != T:
            rounds.append(T)
        for r in rounds:
            w.writerow([agg.label, r, _fmt(agg.mean_regret[r - 1]), _fmt(agg.stderr[r - 1])])
    return buf.getvalue()


def sweep_csv_text(rows: Sequence[SweepRow], n_arms: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "final_regret", "stderr"] + [f"pulls_arm_{i + 1}" for i in range(n_arms)])
    for row in rows:
        w.writerow([row.tau, _fmt(row.final_regret), _fmt(row.stderr)] + [_fmt(p) for p in row.mean_pulls])
    return buf.getvalue()


def default_jobs() -> int:
    return os.cpu_count() or 1
