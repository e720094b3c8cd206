"""Sliding-window sufficient statistics over the last ``tau`` rounds.

The window is over *rounds*, not over per-arm pulls: one global FIFO ring
holds the most recent ``tau`` ``(arm, reward)`` observations and per-arm
aggregates are kept in step with it.  When a decision is made at round
``t`` the window therefore covers rounds ``max(1, t - tau) .. t - 1``.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import ParameterError

__all__ = ["WindowStats", "brute_force_recompute"]


class WindowStats:
    """Per-arm pull counts and reward sums over a sliding window of rounds.

    Reward sums use Neumaier compensated summation so that adding and
    evicting ~10^6 real rewards does not accumulate drift; the compensation
    is cleared whenever an arm's window count drops to zero.
    """

    def __init__(self, n_arms: int, tau: int):
        if n_arms < 1:
            raise ParameterError("n_arms must be >= 1")
        if int(tau) != tau or tau < 1:
            raise ParameterError(f"window length tau must be an integer >= 1, got {tau!r}")
        self.n_arms = int(n_arms)
        self.tau = int(tau)
        self._ring_arms = [0] * self.tau
        self._ring_rewards = [0.0] * self.tau
        self._head = 0  # slot of the oldest observation once full
        self._size = 0
        self.n_recorded = 0
        self._counts = [0] * self.n_arms
        self._sums = [0.0] * self.n_arms
        self._comp = [0.0] * self.n_arms

    def __len__(self) -> int:
        return self._size

    def __repr__(self) -> str:
        return f"WindowStats(n_arms={self.n_arms}, tau={self.tau}, size={self._size})"

    def _add(self, arm: int, x: float) -> None:
        s = self._sums[arm]
        total = s + x
        if abs(s) >= abs(x):
            self._comp[arm] += (s - total) + x
        else:
            self._comp[arm] += (x - total) + s
        self._sums[arm] = total

    def _evict(self) -> None:
        slot = self._head
        arm = self._ring_arms[slot]
        reward = self._ring_rewards[slot]
        count = self._counts[arm] - 1
        self._counts[arm] = count
        if count == 0:
            self._sums[arm] = 0.0
            self._comp[arm] = 0.0
        else:
            self._add(arm, -reward)
        self._head = (slot + 1) % self.tau
        self._size -= 1

    def record(self, arm: int, reward: float) -> None:
        """Append the newest observation, evicting the oldest if the ring is full."""
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} out of range for K={self.n_arms}")
        if self._size == self.tau:
            self._evict()
        slot = (self._head + self._size) % self.tau
        self._ring_arms[slot] = arm
        self._ring_rewards[slot] = reward
        self._size += 1
        self._counts[arm] += 1
        self._add(arm, reward)
        self.n_recorded += 1

    def pull_count(self, arm: int) -> int:
        return self._counts[arm]

    def reward_sum(self, arm: int) -> float:
        return self._sums[arm] + self._comp[arm]

    def window_mean(self, arm: int) -> float | None:
        """Window average reward of ``arm``, or ``None`` for an empty window."""
        n = self._counts[arm]
        if n == 0:
            return None
        return (self._sums[arm] + self._comp[arm]) / n

    def counts(self) -> np.ndarray:
        return np.array(self._counts, dtype=np.int64)

    def sums(self) -> np.ndarray:
        return np.array([s + c for s, c in zip(self._sums, self._comp)])

    def contents(self) -> list[tuple[int, float]]:
        """Buffered observations, oldest first."""
        idx = [(self._head + j) % self.tau for j in range(self._size)]
        return [(self._ring_arms[i], self._ring_rewards[i]) for i in idx]


def brute_force_recompute(
    history: Sequence[tuple[int, float]], t: int, tau: int, n_arms: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-arm ``(pull_count, reward_sum)`` over rounds ``max(1, t-tau)..t-1``.

    ``history[j]`` is the observation of round ``j + 1``.
    """
    if t > len(history) + 1:
        raise ParameterError(f"round {t} is beyond the recorded history of {len(history)} rounds")
    lo = max(1, t - tau)
    counts = np.zeros(n_arms, dtype=np.int64)
    per_arm: list[list[float]] = [[] for _ in range(n_arms)]
    for arm, reward in history[lo - 1 : t - 1]:
        counts[arm] += 1
        per_arm[arm].append(reward)
    sums = np.array([math.fsum(r) for r in per_arm])
    return counts, sums
