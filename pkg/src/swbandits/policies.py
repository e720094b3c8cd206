"""Sliding-window Thompson sampling policies and simple baselines.

Every policy implements the same two-call protocol for round ``t``::

    arm = policy.select(t, rng)
    policy.observe(t, arm, reward)

Posterior parameters are never stored; they are recomputed from the window
statistics on demand, so they are pure functions of the last ``tau``
observations.
"""
from __future__ import annotations

import math
import warnings

from .distributions import RngStream
from .errors import ConfigurationError, ContractError
from .rewards import RewardTrajectory
from .window import WindowStats

__all__ = [
    "Policy",
    "BetaSWTS",
    "GammaSWGTS",
    "StationaryBetaTS",
    "StationaryGaussianTS",
    "Oracle",
    "Uniform",
    "FixedArm",
    "make_policy",
    "default_gamma",
    "POLICY_KEYS",
]


class Policy:
    """Base class: ``select`` picks an arm, ``observe`` feeds back the reward."""

    name = "policy"
    requires_bernoulli = False

    def __init__(self, n_arms: int):
        if n_arms < 2:
            raise ConfigurationError("a bandit needs at least two arms")
        self.n_arms = int(n_arms)

    @property
    def label(self) -> str:
        return self.name

    def reset(self) -> None:
        pass

    def select(self, t: int, rng: RngStream) -> int:
        raise NotImplementedError

    def observe(self, t: int, arm: int, reward: float) -> None:
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label})"


class BetaSWTS(Policy):
    """Thompson sampling with Beta posteriors fed by the last ``tau`` rounds.

    Arm ``i`` is scored by a draw from ``Beta(1 + S_i, 1 + N_i - S_i)``
    where ``S_i`` and ``N_i`` are its successes and pulls inside the window;
    an empty window gives the uniform ``Beta(1, 1)``.
    """

    name = "beta_swts"
    requires_bernoulli = True

    def __init__(self, n_arms: int, tau: int):
        super().__init__(n_arms)
        self.tau = int(tau)
        self.stats = WindowStats(n_arms, tau)

    @property
    def label(self) -> str:
        return f"{self.name}(tau={self.tau})"

    def reset(self) -> None:
        self.stats = WindowStats(self.n_arms, self.tau)

    def posterior(self, arm: int) -> tuple[float, float]:
        s = self.stats.reward_sum(arm)
        n = self.stats.pull_count(arm)
        return 1.0 + s, 1.0 + n - s

    def select(self, t: int, rng: RngStream) -> int:
        gamma = rng.gen.standard_gamma
        stats = self.stats
        best, best_theta = 0, -1.0
        for arm in range(self.n_arms):
            s = stats.reward_sum(arm)
            x = gamma(1.0 + s)
            theta = x / (x + gamma(1.0 + stats.pull_count(arm) - s))
            if theta > best_theta:
                best, best_theta = arm, theta
        return best

    def observe(self, t: int, arm: int, reward: float) -> None:
        if reward != 0.0 and reward != 1.0:
            raise ContractError(f"{self.name} needs rewards in {{0, 1}}, got {reward!r} at round {t}")
        self.stats.record(arm, reward)


class StationaryBetaTS(BetaSWTS):
    """Beta Thompson sampling over the whole horizon (a window that never evicts)."""

    name = "stationary_ts"

    def __init__(self, n_arms: int, horizon: int):
        super().__init__(n_arms, horizon)

    @property
    def label(self) -> str:
        return self.name


class GammaSWGTS(Policy):
    """Gaussian Thompson sampling on a sliding window with forced exploration.

    Round-robin schedule: in every block of ``tau`` consecutive rounds
    ``m*tau + 1 .. (m+1)*tau`` the first ``n_arms`` rounds pull arms
    ``0..n_arms-1`` in order.  Block ``m = 0`` is the initial warm-up.  With
    ``tau >= n_arms`` every window seen at a free round contains at least
    one pull of each arm.  Free rounds score arm ``i`` with a draw from
    ``N(mean_i, 1 / (gamma * N_i))``.
    """

    name = "gamma_swgts"

    def __init__(self, n_arms: int, tau: int, gamma: float):
        super().__init__(n_arms)
        if not gamma > 0:
            raise ConfigurationError(f"gamma must be positive, got {gamma!r}")
        if tau < n_arms:
            raise ConfigurationError(
                f"{self.name} needs tau >= K so the round-robin fits in a window (tau={tau}, K={n_arms})"
            )
        self.tau = int(tau)
        self.gamma = float(gamma)
        self.stats = WindowStats(n_arms, tau)
        self.min_count_at_draw: int | None = None

    @property
    def label(self) -> str:
        return f"{self.name}(tau={self.tau}, gamma={self.gamma:g})"

    def reset(self) -> None:
        self.stats = WindowStats(self.n_arms, self.tau)
        self.min_count_at_draw = None

    def forced_arm(self, t: int) -> int | None:
        pos = (t - 1) % self.tau
        return pos if pos < self.n_arms else None

    def posterior(self, arm: int) -> tuple[float, float] | None:
        n = self.stats.pull_count(arm)
        if n == 0:
            return None
        return self.stats.reward_sum(arm) / n, 1.0 / (self.gamma * n)

    def select(self, t: int, rng: RngStream) -> int:
        pos = (t - 1) % self.tau
        if pos < self.n_arms:
            return pos
        stats = self.stats
        counts = stats._counts
        low = min(counts)
        if low == 0:
            raise RuntimeError(f"{self.label}: empty window for an arm at free round {t}")
        if self.min_count_at_draw is None or low < self.min_count_at_draw:
            self.min_count_at_draw = low
        normal = rng.gen.standard_normal
        g = self.gamma
        best, best_theta = 0, -math.inf
        for arm in range(self.n_arms):
            n = counts[arm]
            theta = stats.reward_sum(arm) / n + normal() / math.sqrt(g * n)
            if theta > best_theta:
                best, best_theta = arm, theta
        return best

    def observe(self, t: int, arm: int, reward: float) -> None:
        self.stats.record(arm, reward)


class StationaryGaussianTS(GammaSWGTS):
    """Gaussian Thompson sampling over the whole horizon; only the warm-up is forced."""

    name = "stationary_gts"

    def __init__(self, n_arms: int, horizon: int, gamma: float):
        super().__init__(n_arms, horizon, gamma)

    @property
    def label(self) -> str:
        return f"{self.name}(gamma={self.gamma:g})"


class Oracle(Policy):
    """Pulls the optimal arm of every round (zero regret by construction)."""

    name = "oracle"

    def __init__(self, traj: RewardTrajectory | None):
        if traj is None:
            raise ConfigurationError("the oracle policy needs a trajectory")
        super().__init__(traj.n_arms)
        self._optimal = traj.optimal_arms()

    def select(self, t: int, rng: RngStream) -> int:
        return int(self._optimal[t - 1])


class Uniform(Policy):
    name = "uniform"

    def select(self, t: int, rng: RngStream) -> int:
        return rng.integers(self.n_arms)


class FixedArm(Policy):
    name = "fixed"

    def __init__(self, n_arms: int, arm: int):
        super().__init__(n_arms)
        if not 0 <= arm < n_arms:
            raise ConfigurationError(f"fixed arm {arm} out of range for K={n_arms}")
        self.arm = int(arm)

    @property
    def label(self) -> str:
        return f"{self.name}(arm={self.arm + 1})"

    def select(self, t: int, rng: RngStream) -> int:
        return self.arm


POLICY_KEYS = {"policy", "tau", "gamma", "arm", "label"}
_POLICY_NAMES = ("beta_swts", "gamma_swgts", "stationary_ts", "stationary_gts", "oracle", "uniform", "fixed")


def default_gamma(proxy_variance: float) -> float:
    """``min(1 / (4 sigma^2), 1)``, the largest gamma covered by the regret bounds."""
    if proxy_variance <= 0:
        return 1.0
    return min(1.0 / (4.0 * proxy_variance), 1.0)


def _int_param(config: dict, key: str) -> int:
    if key not in config:
        raise ConfigurationError(f"policy {config.get('policy')!r} needs {key!r}")
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{key!r} must be an integer, got {value!r}")
    return value


def make_policy(config: dict, traj: RewardTrajectory) -> Policy:
    """Build a policy from its JSON configuration.

    ``arm`` in the configuration is 1-based, matching the CSV column names.
    """
    unknown = set(config) - POLICY_KEYS
    if unknown:
        raise ConfigurationError(f"unknown policy keys {sorted(unknown)}")
    kind = config.get("policy")
    if kind not in _POLICY_NAMES:
        raise ConfigurationError(f"unknown policy {kind!r}; expected one of {', '.join(_POLICY_NAMES)}")
    K, T = traj.n_arms, traj.horizon

    if kind in ("beta_swts", "stationary_ts") and not traj.family.is_bernoulli:
        raise ConfigurationError(f"{kind} needs Bernoulli rewards, the trajectory is {traj.family.name}")

    gamma = None
    if kind in ("gamma_swgts", "stationary_gts"):
        limit = default_gamma(traj.family.proxy_variance)
        gamma = config.get("gamma")
        if gamma is None:
            gamma = limit
        elif not isinstance(gamma, (int, float)) or isinstance(gamma, bool) or not gamma > 0:
            raise ConfigurationError(f"gamma must be a positive number, got {gamma!r}")
        elif gamma > limit:
            warnings.warn(
                f"gamma={gamma} exceeds min(1/(4 sigma^2), 1) = {limit:g}; regret guarantees do not apply",
                stacklevel=2,
            )

    if kind == "beta_swts":
        tau = _int_param(config, "tau")
        if tau < 1:
            raise ConfigurationError(f"tau must be >= 1, got {tau}")
        policy: Policy = BetaSWTS(K, tau)
    elif kind == "stationary_ts":
        policy = StationaryBetaTS(K, T)
    elif kind == "gamma_swgts":
        policy = GammaSWGTS(K, _int_param(config, "tau"), float(gamma))
    elif kind == "stationary_gts":
        policy = StationaryGaussianTS(K, T, float(gamma))
    elif kind == "oracle":
        policy = Oracle(traj)
    elif kind == "uniform":
        policy = Uniform(K)
    else:
        policy = FixedArm(K, _int_param(config, "arm") - 1)
    return policy
