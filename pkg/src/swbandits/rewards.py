"""Mean-reward trajectories, environment generators and reward sampling.

A :class:`RewardTrajectory` is the fully materialised ``K x T`` matrix of
expected rewards together with the reward family.  Rounds are 1-based
(``t = 1..T``) throughout the public API; arms are 0-based indices.

Tie-break rule: wherever an argmax over arms is taken, the lowest index
wins.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .distributions import RngStream
from .errors import ConfigurationError, ParameterError

__all__ = [
    "Family",
    "BERNOULLI",
    "RewardTrajectory",
    "make_piecewise_constant",
    "make_crossing_sinusoid",
    "make_piecewise_sinusoid",
    "make_lipschitz_smooth",
    "figure2_environment",
    "figure3_environment",
    "figure4_environment",
    "make_environment",
    "load_trajectory",
    "save_trajectory",
    "sample_reward",
    "optimal_arm",
]


@dataclass(frozen=True)
class Family:
    """Reward family: ``bernoulli`` or ``subgaussian`` with a proxy variance.

    Sub-Gaussian rewards are ``mu + noise``.  ``noise="gaussian"`` draws
    ``N(0, proxy_variance)``.  ``noise="bounded"`` draws uniformly from
    ``[-b, b]`` with ``b = sqrt(proxy_variance)``; by Hoeffding's lemma a
    zero-mean variable supported on an interval of width ``2b`` is
    sub-Gaussian with proxy variance ``b**2``.
    """

    name: str = "bernoulli"
    proxy_variance: float = 0.25
    noise: str = "gaussian"

    def __post_init__(self):
        if self.name not in ("bernoulli", "subgaussian"):
            raise ParameterError(f"unknown reward family {self.name!r}")
        if self.noise not in ("gaussian", "bounded"):
            raise ParameterError(f"unknown noise kind {self.noise!r}")
        if not (self.proxy_variance >= 0 and math.isfinite(self.proxy_variance)):
            raise ParameterError(f"proxy variance must be >= 0, got {self.proxy_variance!r}")

    @property
    def is_bernoulli(self) -> bool:
        return self.name == "bernoulli"

    def to_dict(self) -> dict:
        return {"family": self.name, "proxy_variance": float(self.proxy_variance), "noise": self.noise}

    @classmethod
    def from_dict(cls, d: dict) -> "Family":
        name = d.get("family", "bernoulli")
        if name == "bernoulli":
            # Bernoulli variables are 1/4 sub-Gaussian.
            return cls("bernoulli", float(d.get("proxy_variance", 0.25)), d.get("noise", "gaussian"))
        return cls(name, float(d.get("proxy_variance", 1.0)), d.get("noise", "gaussian"))

    @classmethod
    def subgaussian(cls, proxy_variance: float = 1.0, noise: str = "gaussian") -> "Family":
        return cls("subgaussian", proxy_variance, noise)


BERNOULLI = Family()


@dataclass(frozen=True, eq=False)
class RewardTrajectory:
    means: np.ndarray
    family: Family = BERNOULLI
    _optimal: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        means = np.array(self.means, dtype=float, copy=True)
        if means.ndim != 2:
            raise ParameterError("means must be a K x T matrix")
        K, T = means.shape
        if K < 2 or T < 1:
            raise ParameterError(f"need K >= 2 arms and T >= 1 rounds, got K={K}, T={T}")
        if not np.all(np.isfinite(means)):
            raise ParameterError("means contain non-finite entries")
        if self.family.is_bernoulli and (means.min() < 0.0 or means.max() > 1.0):
            i, t = np.unravel_index(np.argmax((means < 0) | (means > 1)), means.shape)
            raise ParameterError(
                f"Bernoulli means must lie in [0, 1]; arm {i} round {t + 1} has {means[i, t]!r}"
            )
        means.flags.writeable = False
        optimal = np.argmax(means, axis=0)
        optimal.flags.writeable = False
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "_optimal", optimal)

    @property
    def n_arms(self) -> int:
        return self.means.shape[0]

    @property
    def horizon(self) -> int:
        return self.means.shape[1]

    K = n_arms
    T = horizon

    def __repr__(self) -> str:
        return f"RewardTrajectory(K={self.n_arms}, T={self.horizon}, family={self.family})"

    def mean(self, arm: int, t: int) -> float:
        self._check_index(arm, t)
        return float(self.means[arm, t - 1])

    def optimal_arms(self) -> np.ndarray:
        """Lowest-index optimal arm for every round, as an array of length T."""
        return self._optimal

    def optimal_means(self) -> np.ndarray:
        return self.means[self._optimal, np.arange(self.horizon)]

    def lipschitz_constant(self) -> float:
        """Largest one-step change ``max_{i,t} |mu_{i,t+1} - mu_{i,t}|``."""
        if self.horizon < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.means, axis=1))))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps(self.family.to_dict(), sort_keys=True).encode())
        h.update(np.ascontiguousarray(self.means).tobytes())
        return h.hexdigest()

    def _check_index(self, arm: int, t: int) -> None:
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} out of range for K={self.n_arms}")
        if not 1 <= t <= self.horizon:
            raise IndexError(f"round {t} out of range 1..{self.horizon}")

    # Realised rewards are a deterministic function of (mean, noise), where
    # the noise variate does not depend on the arm.  Episodes pre-draw one
    # variate per round, which gives common random numbers across policies.
    def draw_noise(self, rng: RngStream, size: int | None = None) -> np.ndarray:
        size = self.horizon if size is None else size
        if self.family.is_bernoulli or self.family.noise == "bounded":
            return rng.gen.random(size)
        return rng.gen.standard_normal(size)

    def realize(self, mu: float, noise: float) -> float:
        fam = self.family
        if fam.is_bernoulli:
            return 1.0 if noise < mu else 0.0
        scale = math.sqrt(fam.proxy_variance)
        if fam.noise == "gaussian":
            return mu + scale * noise
        return mu + scale * (2.0 * noise - 1.0)


def sample_reward(traj: RewardTrajectory, arm: int, t: int, rng: RngStream) -> float:
    """Draw one realised reward ``X_{arm,t}``."""
    traj._check_index(arm, t)
    noise = traj.draw_noise(rng, 1)[0]
    return traj.realize(float(traj.means[arm, t - 1]), float(noise))


def optimal_arm(traj: RewardTrajectory, t: int) -> int:
    if not 1 <= t <= traj.horizon:
        raise IndexError(f"round {t} out of range 1..{traj.horizon}")
    return int(traj.optimal_arms()[t - 1])


def _as_family(family) -> Family:
    if family is None:
        return BERNOULLI
    if isinstance(family, Family):
        return family
    if isinstance(family, str):
        return Family.from_dict({"family": family})
    return Family.from_dict(family)


def make_piecewise_constant(
    K: int,
    T: int,
    phase_boundaries: Sequence[int],
    phase_means: Sequence[Sequence[float]],
    family=None,
) -> RewardTrajectory:
    """Piecewise-constant means; each boundary is the first round of a new phase."""
    bounds = [int(b) for b in phase_boundaries]
    if any(b < 1 or b > T for b in bounds):
        raise ParameterError(f"phase boundaries must lie in 1..{T}, got {bounds}")
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise ParameterError(f"phase boundaries must be strictly ascending, got {bounds}")
    if len(phase_means) != len(bounds) + 1:
        raise ParameterError(
            f"{len(bounds)} boundaries need {len(bounds) + 1} mean vectors, got {len(phase_means)}"
        )
    means = np.empty((K, T))
    edges = [1] + bounds + [T + 1]
    for vec, start, stop in zip(phase_means, edges, edges[1:]):
        if len(vec) != K:
            raise ParameterError(f"mean vector {list(vec)} has length {len(vec)}, expected K={K}")
        means[:, start - 1 : stop - 1] = np.asarray(vec, dtype=float)[:, None]
    return RewardTrajectory(means, _as_family(family))


def make_crossing_sinusoid(
    T: int,
    amplitude: float,
    period: float,
    center: float = 0.5,
    family=None,
) -> RewardTrajectory:
    """Two anti-phase sinusoids ``center +/- amplitude * sin(2 pi t / period)``."""
    if period <= 0:
        raise ParameterError("period must be positive")
    t = np.arange(1, T + 1)
    s = amplitude * np.sin(2.0 * np.pi * t / period)
    fam = _as_family(family)
    if fam.is_bernoulli and (center - abs(amplitude) < 0 or center + abs(amplitude) > 1):
        raise ParameterError(
            f"center {center} +/- amplitude {amplitude} leaves [0, 1] for Bernoulli rewards"
        )
    return RewardTrajectory(np.vstack([center + s, center - s]), fam)


def make_piecewise_sinusoid(
    T: int,
    phase_boundaries: Sequence[int],
    phase_shapes: Sequence[Sequence[Sequence[float]]],
    family=None,
) -> RewardTrajectory:
    """Per-phase sinusoids.

    ``phase_shapes[p][i] = (center, amplitude, cycles)`` gives arm ``i`` in
    phase ``p`` the mean ``center + amplitude * sin(2 pi cycles * u)`` where
    ``u`` runs over ``[0, 1)`` within the phase.
    """
    bounds = [int(b) for b in phase_boundaries]
    if len(phase_shapes) != len(bounds) + 1:
        raise ParameterError("need one shape list per phase")
    K = len(phase_shapes[0])
    means = np.empty((K, T))
    edges = [1] + bounds + [T + 1]
    for shapes, start, stop in zip(phase_shapes, edges, edges[1:]):
        if len(shapes) != K:
            raise ParameterError("every phase must describe the same number of arms")
        length = stop - start
        u = np.arange(length) / max(length, 1)
        for i, (c, a, f) in enumerate(shapes):
            means[i, start - 1 : stop - 1] = c + a * np.sin(2.0 * np.pi * f * u)
    return RewardTrajectory(means, _as_family(family))


def make_lipschitz_smooth(
    K: int,
    T: int,
    sigma: float,
    delta_prime: float,
    shape: str = "ramps",
    center: float = 0.5,
    period: float | None = None,
    phase: float = 0.0,
    family=None,
) -> tuple[RewardTrajectory, float]:
    """Smoothly varying means with one-step drift at most ``sigma``.

    Shapes:

    ``ramps``
        Arms start ``delta_prime`` apart around ``center`` and diverge
        linearly; every arm moves by at most ``sigma / 2`` per round.
    ``parallel``
        Arms keep a constant spacing ``delta_prime`` and share a common
        sinusoidal drift of period ``period`` whose slope never exceeds
        ``sigma``.
    ``sinusoid``
        Arm ``i`` follows ``center + a sin(2 pi t / period + phase + 2 pi i / K)``
        with ``a = sigma * period / (2 pi)``, so arms cross repeatedly.

    Returns the trajectory and its realised maximum one-step drift.
    """
    if sigma < 0:
        raise ParameterError("sigma must be non-negative")
    if delta_prime < 0:
        raise ParameterError("delta_prime must be non-negative")
    fam = _as_family(family)
    t = np.arange(T, dtype=float)
    offsets = np.arange(K) - (K - 1) / 2.0
    # Shave a hair off the slope so rounding never pushes the audit above sigma.
    slope = sigma * (1.0 - 1e-9)
    if shape == "ramps":
        spread = delta_prime + slope * t / max(K - 1, 1)
        means = center + offsets[:, None] * spread[None, :]
    elif shape == "parallel":
        if period is None:
            period = float(T)
        amp = slope * period / (2.0 * np.pi)
        drift = amp * np.sin(2.0 * np.pi * t / period + phase)
        means = center + offsets[:, None] * delta_prime + drift[None, :]
    elif shape == "sinusoid":
        if period is None:
            period = float(T)
        amp = slope * period / (2.0 * np.pi)
        arg = 2.0 * np.pi * t[None, :] / period + phase + 2.0 * np.pi * np.arange(K)[:, None] / K
        means = center + amp * np.sin(arg)
    else:
        raise ParameterError(f"unknown smooth shape {shape!r}")
    if fam.is_bernoulli and (means.min() < 0.0 or means.max() > 1.0):
        raise ParameterError(
            f"shape {shape!r} with sigma={sigma}, delta_prime={delta_prime} leaves [0, 1] "
            f"(range {means.min():.4g}..{means.max():.4g})"
        )
    traj = RewardTrajectory(means, fam)
    return traj, traj.lipschitz_constant()


# The three illustrative environments below follow the shapes drawn for the
# abruptly changing setting, rescaled from [0, 2] into [0, 1] and stretched
# over three equal phases of the horizon.


def _thirds(T: int) -> list[int]:
    return [T // 3 + 1, 2 * T // 3 + 1]


def figure2_environment(T: int = 3000, family=None) -> RewardTrajectory:
    """Two anti-phase sinusoids crossing near the thirds of the horizon.

    The period is nudged by half a round so no crossing lands exactly on an
    integer round (an exact tie would leave the optimal arm ambiguous).
    """
    return make_crossing_sinusoid(T, amplitude=0.4, period=2.0 * T / 3.0 + 0.5, center=0.5, family=family)


def figure3_environment(T: int = 3000, family=None) -> RewardTrajectory:
    """Oscillating means that jump at two boundaries, optimal arm separated in each phase."""
    shapes = [
        [(0.75, 0.15, 2.5), (0.40, -0.15, 2.5)],
        [(0.60, -0.10, 4.0), (0.85, 0.05, 3.5)],
        [(0.29, 0.05, 4.5), (0.10, -0.10, 4.0)],
    ]
    return make_piecewise_sinusoid(T, _thirds(T), shapes, family=family)


def figure4_environment(T: int = 3000, family=None) -> RewardTrajectory:
    """Piecewise-constant means with three phases."""
    return make_piecewise_constant(
        2, T, _thirds(T), [(0.60, 0.40), (0.15, 0.25), (0.85, 0.90)], family=family
    )


def make_environment(spec: dict, base_dir: str | os.PathLike | None = None) -> RewardTrajectory:
    """Build a trajectory from an environment description (see README)."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    family = _as_family(spec.pop("family", None))
    try:
        if kind == "piecewise_constant":
            return make_piecewise_constant(
                int(spec["K"]), int(spec["T"]), spec.get("boundaries", []), spec["means"], family
            )
        if kind == "crossing_sinusoid":
            return make_crossing_sinusoid(
                int(spec["T"]), float(spec["amplitude"]), float(spec["period"]),
                float(spec.get("center", 0.5)), family,
            )
        if kind == "lipschitz_smooth":
            traj, _ = make_lipschitz_smooth(
                int(spec["K"]), int(spec["T"]), float(spec["sigma"]), float(spec["delta_prime"]),
                shape=spec.get("shape", "ramps"), center=float(spec.get("center", 0.5)),
                period=spec.get("period"), phase=float(spec.get("phase", 0.0)), family=family,
            )
            return traj
        if kind == "custom_file":
            path = Path(spec["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return load_trajectory(path)
    except KeyError as exc:
        raise ConfigurationError(f"environment kind {kind!r} is missing key {exc.args[0]!r}") from None
    raise ConfigurationError(f"unknown environment kind {kind!r}")


def _sidecar(csv_path: Path) -> Path:
    return csv_path.with_suffix(".json")


def save_trajectory(traj: RewardTrajectory, csv_path: str | os.PathLike) -> None:
    """Write ``t,mu_1..mu_K`` rows plus the JSON family sidecar."""
    csv_path = Path(csv_path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"mu_{i + 1}" for i in range(traj.n_arms)])
    for t in range(traj.horizon):
        writer.writerow([t + 1] + [format(float(v), ".17g") for v in traj.means[:, t]])
    csv_path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    _sidecar(csv_path).write_text(json.dumps(traj.family.to_dict(), sort_keys=True) + "\n", encoding="utf-8")


def load_trajectory(csv_path: str | os.PathLike) -> RewardTrajectory:
    csv_path = Path(csv_path)
    meta_path = _sidecar(csv_path)
    try:
        text = csv_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"trajectory file not found: {csv_path}") from None
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"trajectory metadata not found: {meta_path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{meta_path}: invalid JSON ({exc})") from None
    unknown = set(meta) - {"family", "proxy_variance", "noise"}
    if unknown:
        raise ConfigurationError(f"{meta_path}: unknown keys {sorted(unknown)}")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ConfigurationError(f"{csv_path}: empty file")
    header = rows[0]
    K = len(header) - 1
    if header != ["t"] + [f"mu_{i + 1}" for i in range(K)]:
        raise ConfigurationError(f"{csv_path}: header must be t,mu_1,...,mu_K, got {','.join(header)}")
    body = [r for r in rows[1:] if r]
    try:
        ts = [int(r[0]) for r in body]
        values = [[float(x) for x in r[1:]] for r in body]
    except (ValueError, IndexError) as exc:
        raise ConfigurationError(f"{csv_path}: malformed row ({exc})") from None
    if ts != list(range(1, len(body) + 1)):
        raise ConfigurationError(f"{csv_path}: t column must run 1..T without gaps")
    if any(len(v) != K for v in values):
        raise ConfigurationError(f"{csv_path}: every row needs {K} means")
    try:
        return RewardTrajectory(np.asarray(values).T, Family.from_dict(meta))
    except ParameterError as exc:
        raise ConfigurationError(f"{csv_path}: {exc}") from None
