"""Seeded random streams, samplers and the Beta/Binomial CDFs.

All randomness in the package flows through :class:`RngStream`, a thin
wrapper around numpy's ``PCG64`` bit generator seeded by a
``SeedSequence``.  A stream is identified by a 64-bit seed plus an optional
key (for example ``(episode, "policy")``); streams with different keys are
statistically independent and each one is reproducible on its own, so
adding arms or policies to an experiment never perturbs another stream.

Beta variates are produced as the ratio of two Gamma variates,
``G_a / (G_a + G_b)``.  The CDFs are computed here rather than borrowed
from scipy so that the package has a self-contained numeric core; scipy
is only used as an oracle in the test-suite.
"""
from __future__ import annotations

import math
import zlib
from typing import Hashable

import numpy as np

from .errors import ParameterError

__all__ = [
    "RngStream",
    "sample_beta",
    "sample_gaussian",
    "sample_bernoulli",
    "beta_cdf",
    "binomial_cdf",
    "beta_binomial_identity_gap",
]

_MASK64 = (1 << 64) - 1


def _key_word(part: Hashable) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ParameterError(f"stream key parts must be non-negative, got {part}")
        return int(part) & _MASK64
    # crc32 is stable across interpreter runs, unlike hash().
    return zlib.crc32(str(part).encode("utf-8"))


class RngStream:
    """Reproducible random stream keyed by ``(seed, *key)``.

    The underlying generator is numpy's PCG64 seeded through
    ``SeedSequence(seed, spawn_key=key)``.  Instances are single-owner and
    must not be shared between concurrently running episodes.
    """

    __slots__ = ("seed", "key", "gen")

    def __init__(self, seed: int, *key: Hashable):
        seed = int(seed)
        if not 0 <= seed <= _MASK64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key = tuple(key)
        words = tuple(_key_word(k) for k in self.key)
        ss = np.random.SeedSequence(seed, spawn_key=words)
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def derive(self, *key: Hashable) -> "RngStream":
        """Return an independent child stream; this stream is left untouched."""
        return RngStream(self.seed, *self.key, *key)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key!r})"

    # Unchecked fast paths used inside the simulation loops.
    def uniform(self) -> float:
        return self.gen.random()

    def standard_normal(self) -> float:
        return self.gen.standard_normal()

    def beta(self, alpha: float, beta: float) -> float:
        g = self.gen.standard_gamma
        x = g(alpha)
        y = g(beta)
        return x / (x + y)

    def integers(self, high: int) -> int:
        return int(self.gen.integers(high))


def derive_seed(base_seed: int, *key: Hashable) -> int:
    """Deterministically map ``(base_seed, *key)`` to a fresh 64-bit seed."""
    words = tuple(_key_word(k) for k in key)
    ss = np.random.SeedSequence(int(base_seed), spawn_key=words)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


def sample_beta(alpha: float, beta: float, rng: RngStream) -> float:
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    return rng.beta(alpha, beta)


def sample_gaussian(mean: float, variance: float, rng: RngStream) -> float:
    _check_positive("variance", variance)
    return mean + math.sqrt(variance) * rng.standard_normal()


def sample_bernoulli(mu: float, rng: RngStream) -> int:
    if not 0.0 <= mu <= 1.0:
        raise ParameterError(f"Bernoulli mean must lie in [0, 1], got {mu!r}")
    return 1 if rng.uniform() < mu else 0


_CF_EPS = 1e-16
_CF_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    max_iter = 200 + int(10 * math.sqrt(max(a, b)))
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def beta_cdf(alpha: float, beta: float, y: float) -> float:
    """Regularized incomplete beta function ``I_y(alpha, beta)``."""
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    if not 0.0 <= y <= 1.0:
        raise ParameterError(f"y must lie in [0, 1], got {y!r}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 1.0
    log_front = (
        math.lgamma(alpha + beta)
        - math.lgamma(alpha)
        - math.lgamma(beta)
        + alpha * math.log(y)
        + beta * math.log1p(-y)
    )
    front = math.exp(log_front)
    # The fraction converges fast only on one side of the mean.
    if y < (alpha + 1.0) / (alpha + beta + 2.0):
        value = front * _betacf(alpha, beta, y) / alpha
    else:
        value = 1.0 - front * _betacf(beta, alpha, 1.0 - y) / beta
    return min(1.0, max(0.0, value))


_LOG_SPACE_THRESHOLD = 1000


def _log_binom(n: int, k: int) -> float:
    if n <= _LOG_SPACE_THRESHOLD:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binomial_cdf(n: int, p: float, k: int) -> float:
    """``P(Bin(n, p) <= k)`` by direct summation of the probability mass.

    Each term is formed in log space (exact integer binomial coefficients up
    to ``n = 1000``, ``lgamma`` beyond) and the terms are added with
    ``math.fsum``.
    """
    if int(n) != n or n < 0:
        raise ParameterError(f"n must be a non-negative integer, got {n!r}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p!r}")
    n = int(n)
    k = math.floor(k)
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    log_p = math.log(p)
    log_q = math.log1p(-p)
    # Sum the shorter tail for accuracy and speed.
    if k <= n // 2:
        terms = [math.exp(_log_binom(n, j) + j * log_p + (n - j) * log_q) for j in range(k + 1)]
        return min(1.0, math.fsum(terms))
    terms = [math.exp(_log_binom(n, j) + j * log_p + (n - j) * log_q) for j in range(k + 1, n + 1)]
    return max(0.0, 1.0 - math.fsum(terms))


def beta_binomial_identity_gap(alpha: int, beta: int, y: float) -> float:
    """Absolute gap between ``I_y(a, b)`` and ``1 - P(Bin(a+b-1, y) <= a-1)``.

    For integer ``a, b >= 1`` the two sides agree exactly, so the gap
    measures the combined numerical error of :func:`beta_cdf` and
    :func:`binomial_cdf`.
    """
    if int(alpha) != alpha or int(beta) != beta or alpha < 1 or beta < 1:
        raise ParameterError(f"alpha and beta must be integers >= 1, got {alpha!r}, {beta!r}")
    alpha, beta = int(alpha), int(beta)
    lhs = beta_cdf(alpha, beta, y)
    rhs = 1.0 - binomial_cdf(alpha + beta - 1, y, alpha - 1)
    return abs(lhs - rhs)
