"""Structural quantities of a mean-reward trajectory.

Everything here is computed exactly from the ``K x T`` mean matrix:

* the window extrema of each arm over rounds ``max(1, t - tau) .. t - 1``,
* the set of ambiguous rounds where the optimal arm's window minimum does
  not beat some other arm's window maximum, and the gap on its complement,
* breakpoints, phases and post-breakpoint pseudophases,
* the smooth-setting set of rounds with close arms,
* the shapes of the regret bounds (up to user-supplied constants),
* the sliding-window counting lemma.

Rounds are 1-based; boolean masks are numpy arrays whose entry ``t - 1``
refers to round ``t``.  Intervals of rounds are ``range`` objects.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d
from scipy.optimize import nnls

from .errors import ParameterError
from .rewards import RewardTrajectory

__all__ = [
    "window_extrema",
    "compute_breakpoints",
    "compute_phases",
    "compute_f_tau_prime",
    "compute_delta_tau",
    "abrupt_f_tau",
    "compute_f_delta_prime",
    "check_smooth_assumptions",
    "verify_abrupt_assumption",
    "PhaseVerdict",
    "StructureReport",
    "structure_report",
    "BoundShapeParams",
    "bound_terms",
    "eval_bound_shape",
    "fit_bound_constants",
    "window_lemma_check",
    "mask_to_intervals",
]


def _check_tau(tau) -> int:
    if int(tau) != tau or tau < 1:
        raise ParameterError(f"tau must be an integer >= 1, got {tau!r}")
    return int(tau)


def window_extrema(traj: RewardTrajectory, tau: int, method: str = "brute") -> tuple[np.ndarray, np.ndarray]:
    """Per-arm min and max of the means over rounds ``max(1, t-tau)..t-1``.

    Column ``t - 1`` of each ``K x T`` result belongs to round ``t``; round 1
    has an empty window and gets ``+inf`` / ``-inf``.  ``method="brute"``
    scans every window directly; ``method="filter"`` uses scipy's running
    min/max filters and gives identical values.
    """
    tau = _check_tau(tau)
    mu = traj.means
    K, T = mu.shape
    wmin = np.full((K, T), np.inf)
    wmax = np.full((K, T), -np.inf)
    if T < 2:
        return wmin, wmax
    if method == "brute":
        for t in range(2, T + 1):
            block = mu[:, max(1, t - tau) - 1 : t - 1]
            wmin[:, t - 1] = block.min(axis=1)
            wmax[:, t - 1] = block.max(axis=1)
    elif method == "filter":
        size = min(tau, T)
        origin = (size - 1) // 2
        # trailing[j] covers indices j-size+1..j
        tmin = minimum_filter1d(mu, size, axis=1, mode="constant", cval=np.inf, origin=origin)
        tmax = maximum_filter1d(mu, size, axis=1, mode="constant", cval=-np.inf, origin=origin)
        wmin[:, 1:] = tmin[:, :-1]
        wmax[:, 1:] = tmax[:, :-1]
    else:
        raise ParameterError(f"unknown method {method!r}")
    return wmin, wmax


def _optimal_vs_others(traj: RewardTrajectory, tau: int, method: str) -> tuple[np.ndarray, np.ndarray]:
    wmin, wmax = window_extrema(traj, tau, method)
    T = traj.horizon
    cols = np.arange(T)
    opt = traj.optimal_arms()
    opt_min = wmin[opt, cols]
    masked = wmax.copy()
    masked[opt, cols] = -np.inf
    other_max = masked.max(axis=0)
    return opt_min, other_max


def compute_f_tau_prime(traj: RewardTrajectory, tau: int, method: str = "brute") -> np.ndarray:
    """Rounds where some suboptimal arm's window max reaches the optimal arm's window min.

    Round 1 has an empty window and is never flagged.
    """
    opt_min, other_max = _optimal_vs_others(traj, tau, method)
    mask = opt_min <= other_max
    mask[0] = False
    return mask


def compute_delta_tau(
    traj: RewardTrajectory, tau: int, f_tau: np.ndarray | None = None, method: str = "brute"
) -> float | None:
    """Smallest window gap over the rounds outside ``f_tau``.

    ``f_tau`` defaults to the minimal ambiguous set from
    :func:`compute_f_tau_prime`; any superset of it may be supplied instead
    (for example :func:`abrupt_f_tau` or the smooth-setting set).  Round 1
    is skipped because its window is empty.  Returns ``None`` when no
    round remains.
    """
    opt_min, other_max = _optimal_vs_others(traj, tau, method)
    minimal = opt_min <= other_max
    minimal[0] = False
    if f_tau is None:
        f_tau = minimal
    else:
        f_tau = np.asarray(f_tau, dtype=bool)
        if f_tau.shape != minimal.shape:
            raise ParameterError(f"f_tau must have length T={traj.horizon}")
        if np.any(minimal & ~f_tau):
            t = int(np.argmax(minimal & ~f_tau)) + 1
            raise ParameterError(f"f_tau is not a superset of the ambiguous rounds (misses round {t})")
    keep = ~f_tau
    keep[0] = False
    if not keep.any():
        return None
    return float(np.min(opt_min[keep] - other_max[keep]))


def compute_breakpoints(traj: RewardTrajectory, reading: str = "printed") -> tuple[list[int], int]:
    """Breakpoint rounds (terminal round ``T`` appended) and their count excluding it.

    Round ``t >= 2`` is a breakpoint when the optimal arm changes, or when
    some arm ``i`` other than the previous optimum has ``mu[i, t]`` at least
    the reference value at ``t - 1``.  ``reading="printed"`` uses the
    current optimum as reference, ``mu[i*(t), t-1]``; ``reading="previous"``
    uses ``mu[i*(t-1), t-1]``.  The two only differ when the optimum has
    changed, which is already a breakpoint, so they always agree.
    """
    if reading not in ("printed", "previous"):
        raise ParameterError(f"unknown breakpoint reading {reading!r}")
    mu = traj.means
    T = traj.horizon
    if T < 2:
        return [T], 0
    opt = traj.optimal_arms()
    cols = np.arange(1, T)
    prev_opt = opt[:-1]
    ref_arm = opt[1:] if reading == "printed" else prev_opt
    ref = mu[ref_arm, cols - 1]
    ahead = mu[:, 1:] >= ref[None, :]
    ahead[prev_opt, cols - 1] = False
    flagged = (opt[1:] != prev_opt) | ahead.any(axis=0)
    genuine = [int(t) for t in cols[flagged] + 1]
    rounds = genuine if genuine and genuine[-1] == T else genuine + [T]
    return rounds, len(genuine)


def compute_phases(
    traj: RewardTrajectory, tau: int, breakpoints: Sequence[int] | None = None
) -> tuple[list[range], list[range]]:
    """Phases between consecutive breakpoints and their pseudophases.

    ``breakpoints`` are the rounds that open a new phase, i.e. the first
    ``upsilon_T`` entries returned by :func:`compute_breakpoints`; they are
    computed when omitted.  Phase ``psi`` covers ``[t_{psi-1}, t_psi)`` with
    ``t_0 = 1``, and the last phase runs through ``T`` so the phases
    partition ``1..T``.  The pseudophase drops the first ``tau`` rounds of
    every phase but the first.
    """
    tau = _check_tau(tau)
    T = traj.horizon
    if breakpoints is None:
        rounds, ups = compute_breakpoints(traj)
        breakpoints = rounds[:ups]
    starts = [1] + list(breakpoints)
    stops = list(breakpoints) + [T + 1]
    phases = [range(a, b) for a, b in zip(starts, stops)]
    pseudo = [phases[0]] + [range(min(p.start + tau, p.stop), p.stop) for p in phases[1:]]
    return phases, pseudo


def abrupt_f_tau(traj: RewardTrajectory, tau: int, breakpoints: Sequence[int] | None = None) -> np.ndarray:
    """Union over phases of the rounds not in the pseudophase (the first ``tau`` of each)."""
    phases, pseudo = compute_phases(traj, tau, breakpoints)
    mask = np.zeros(traj.horizon, dtype=bool)
    for ph, ps in zip(phases, pseudo):
        mask[ph.start - 1 : ps.start - 1] = True
    return mask


@dataclass
class PhaseVerdict:
    phase: range
    passed: bool
    margin: float
    witness_round: int | None = None
    witness_arm: int | None = None

    def to_dict(self) -> dict:
        d = {
            "phase": [self.phase.start, self.phase.stop - 1],
            "passed": self.passed,
            "margin": self.margin,
        }
        if not self.passed:
            d["witness"] = {"round": self.witness_round, "arm": self.witness_arm + 1}
        return d


def verify_abrupt_assumption(
    traj: RewardTrajectory, breakpoints: Sequence[int] | None = None
) -> list[PhaseVerdict]:
    """Per phase, check min of the optimal mean > max of every suboptimal mean.

    A failing phase reports the round and arm of the largest suboptimal mean.
    """
    phases, _ = compute_phases(traj, 1, breakpoints)
    mu = traj.means
    opt = traj.optimal_arms()
    cols = np.arange(traj.horizon)
    best = mu[opt, cols]
    others = mu.copy()
    others[opt, cols] = -np.inf
    verdicts = []
    for ph in phases:
        sl = slice(ph.start - 1, ph.stop - 1)
        block = others[:, sl]
        if block.shape[1] == 0:
            continue
        i, j = np.unravel_index(np.argmax(block), block.shape)
        margin = float(best[sl].min() - block[i, j])
        passed = margin > 0
        verdicts.append(
            PhaseVerdict(ph, passed, margin, None if passed else ph.start + int(j), None if passed else int(i))
        )
    return verdicts


def compute_f_delta_prime(traj: RewardTrajectory, delta_prime: float) -> np.ndarray:
    """Rounds ``t`` where two arms' means at ``t - 1`` are closer than ``delta_prime``.

    Round 1 has no predecessor and is judged on its own means.
    """
    if not delta_prime > 0:
        raise ParameterError(f"delta_prime must be positive, got {delta_prime!r}")
    mu = np.sort(traj.means, axis=0)
    closest = np.diff(mu, axis=0).min(axis=0)
    close = closest < delta_prime
    mask = np.empty(traj.horizon, dtype=bool)
    mask[0] = close[0]
    mask[1:] = close[:-1]
    return mask


def check_smooth_assumptions(
    traj: RewardTrajectory,
    delta_prime: float,
    tau: int,
    F: float | None = None,
    beta: float | None = None,
) -> dict:
    """Audit the smoothness assumptions against the trajectory.

    Reports the audited Lipschitz constant, whether ``2 sigma tau < delta_prime``,
    the size of the close-arms set and, if ``F`` and ``beta`` are given,
    whether it stays under ``F * T**beta``.  Infeasibility is a verdict,
    never an exception.
    """
    tau = _check_tau(tau)
    sigma = traj.lipschitz_constant()
    mask = compute_f_delta_prime(traj, delta_prime)
    out = {
        "delta_prime": float(delta_prime),
        "lipschitz_constant": sigma,
        "feasible": bool(2.0 * sigma * tau < delta_prime),
        "reduced_gap": float(delta_prime - 2.0 * sigma * tau),
        "f_delta_prime_size": int(mask.sum()),
        "f_delta_prime": mask,
    }
    if F is not None and beta is not None:
        cap = float(F) * traj.horizon ** float(beta)
        out["cap"] = cap
        out["cap_ok"] = bool(mask.sum() <= cap)
    return out


def mask_to_intervals(mask: np.ndarray) -> list[list[int]]:
    """Run-length encode a round mask as inclusive 1-based ``[start, end]`` pairs."""
    m = np.asarray(mask, dtype=np.int8)
    edges = np.diff(np.concatenate([[0], m, [0]]))
    starts = np.flatnonzero(edges == 1) + 1
    ends = np.flatnonzero(edges == -1)
    return [[int(a), int(b)] for a, b in zip(starts, ends)]


def _range_pair(r: range) -> list[int]:
    return [r.start, r.stop - 1] if len(r) else []


@dataclass
class StructureReport:
    tau: int
    breakpoint_rounds: list[int]
    upsilon_T: int
    phases: list[range]
    pseudophases: list[range]
    f_tau_prime: np.ndarray
    delta_tau: float | None
    delta_tau_abrupt: float | None
    abrupt_verdicts: list[PhaseVerdict]
    breakpoint_readings_agree: bool
    lipschitz_constant: float
    smooth: dict | None = None
    delta_tau_smooth: float | None = None
    bound_shapes: dict = field(default_factory=dict)

    @property
    def f_tau_size(self) -> int:
        return int(self.f_tau_prime.sum())

    def to_dict(self) -> dict:
        d = {
            "tau": self.tau,
            "T": int(self.f_tau_prime.size),
            "breakpoints": self.breakpoint_rounds,
            "upsilon_T": self.upsilon_T,
            "breakpoint_readings_agree": self.breakpoint_readings_agree,
            "phases": [_range_pair(p) for p in self.phases],
            "pseudophases": [_range_pair(p) for p in self.pseudophases],
            "f_tau_prime": mask_to_intervals(self.f_tau_prime),
            "f_tau_prime_size": self.f_tau_size,
            "delta_tau": self.delta_tau,
            "delta_tau_abrupt": self.delta_tau_abrupt,
            "lipschitz_constant": self.lipschitz_constant,
            "assumption_verdicts": {
                "abrupt": {
                    "passed": all(v.passed for v in self.abrupt_verdicts),
                    "phases": [v.to_dict() for v in self.abrupt_verdicts],
                },
            },
            "bound_shapes": self.bound_shapes,
        }
        if self.smooth is not None:
            s = {k: v for k, v in self.smooth.items() if k != "f_delta_prime"}
            s["f_delta_prime"] = mask_to_intervals(self.smooth["f_delta_prime"])
            s["delta_tau_smooth"] = self.delta_tau_smooth
            s["f_tau_prime_within"] = bool(not np.any(self.f_tau_prime & ~self.smooth["f_delta_prime"]))
            s["gap_bound_holds"] = (
                None if self.delta_tau_smooth is None else bool(self.delta_tau_smooth >= s["reduced_gap"])
            )
            d["assumption_verdicts"]["smooth"] = s
        return d


def structure_report(
    traj: RewardTrajectory,
    tau: int,
    delta_prime: float | None = None,
    F: float | None = None,
    beta: float | None = None,
    gamma: float = 1.0,
) -> StructureReport:
    """Collect every structural quantity for one window length."""
    tau = _check_tau(tau)
    bps, ups = compute_breakpoints(traj, "printed")
    alt, _ = compute_breakpoints(traj, "previous")
    genuine = bps[:ups]
    phases, pseudo = compute_phases(traj, tau, genuine)
    f_tau = compute_f_tau_prime(traj, tau)
    delta = compute_delta_tau(traj, tau, f_tau)
    verdicts = verify_abrupt_assumption(traj, genuine)
    delta_abrupt = None
    if all(v.passed for v in verdicts):
        delta_abrupt = compute_delta_tau(traj, tau, f_tau | abrupt_f_tau(traj, tau, genuine))
    report = StructureReport(
        tau=tau,
        breakpoint_rounds=bps,
        upsilon_T=ups,
        phases=phases,
        pseudophases=pseudo,
        f_tau_prime=f_tau,
        delta_tau=delta,
        delta_tau_abrupt=delta_abrupt,
        abrupt_verdicts=verdicts,
        breakpoint_readings_agree=bps == alt,
        lipschitz_constant=traj.lipschitz_constant(),
    )
    if delta_prime is not None:
        smooth = check_smooth_assumptions(traj, delta_prime, tau, F, beta)
        report.smooth = smooth
        report.delta_tau_smooth = compute_delta_tau(traj, tau, f_tau | smooth["f_delta_prime"])
    T = traj.horizon
    shapes = {}
    if delta is not None and delta > 0:
        for thm in ("general-beta", "general-gauss", "abrupt-beta", "abrupt-gauss"):
            shapes[thm] = eval_bound_shape(
                BoundShapeParams(thm, T=T, tau=tau, delta=delta, upsilon=ups, f_tau_size=report.f_tau_size, gamma=gamma)
            )
    if report.smooth is not None and report.smooth["feasible"]:
        sigma = report.smooth["lipschitz_constant"]
        for thm in ("smooth-beta", "smooth-gauss"):
            shapes[thm] = eval_bound_shape(
                BoundShapeParams(
                    thm, T=T, tau=tau, delta_prime=delta_prime, sigma=sigma,
                    beta=1.0 if beta is None else beta, F=1.0 if F is None else F, gamma=gamma,
                )
            )
    report.bound_shapes = shapes
    return report


_THEOREMS = ("general-beta", "general-gauss", "abrupt-beta", "abrupt-gauss", "smooth-beta", "smooth-gauss")


@dataclass
class BoundShapeParams:
    """Inputs of a regret-bound shape; ``c1..c3`` weight its three terms."""

    theorem: str
    T: float
    tau: float
    delta: float | None = None
    upsilon: float = 0.0
    f_tau_size: float = 0.0
    gamma: float = 1.0
    delta_prime: float | None = None
    sigma: float = 0.0
    beta: float = 1.0
    F: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0


def bound_terms(p: BoundShapeParams) -> tuple[float, float, float]:
    """The three unweighted terms (non-stationarity, learning, forced exploration)."""
    if p.theorem not in _THEOREMS:
        raise ParameterError(f"unknown theorem {p.theorem!r}")
    if not (p.T > 0 and p.tau >= 1):
        raise ParameterError("need T > 0 and tau >= 1")
    family, kind = p.theorem.split("-")
    if family == "smooth":
        if p.delta_prime is None:
            raise ParameterError("smooth shapes need delta_prime")
        gap = p.delta_prime - 2.0 * p.sigma * p.tau
        if not gap > 0:
            raise ParameterError(f"delta_prime - 2 sigma tau must be positive, got {gap!r}")
        first = p.F * p.T ** p.beta
    else:
        if p.delta is None or not p.delta > 0:
            raise ParameterError(f"the gap delta must be positive, got {p.delta!r}")
        gap = p.delta
        first = p.upsilon * p.tau if family == "abrupt" else p.f_tau_size
    if kind == "beta":
        return first, p.T * math.log(p.tau) / (p.tau * gap**3), 0.0
    if not p.gamma > 0:
        raise ParameterError("gamma must be positive")
    learn = p.T * math.log(p.tau * gap**2 + math.e**6) / (p.gamma * p.tau * gap**2)
    return first, learn, p.T / p.tau


def eval_bound_shape(params: BoundShapeParams) -> float:
    a, b, c = bound_terms(params)
    return params.c1 * a + params.c2 * b + params.c3 * c


def fit_bound_constants(params: Sequence[BoundShapeParams], observed: Sequence[float]) -> tuple[float, float, float]:
    """Non-negative least-squares fit of ``c1..c3`` to observed pull counts or regrets."""
    A = np.array([bound_terms(p) for p in params])
    y = np.asarray(observed, dtype=float)
    used = np.flatnonzero(np.any(A != 0, axis=0))
    coef = np.zeros(3)
    if used.size:
        coef[used], _ = nnls(A[:, used], y)
    return float(coef[0]), float(coef[1]), float(coef[2])


def window_lemma_check(
    A: Iterable[int], tau: int, s: int, T: int, strict: bool = False, inclusive: bool = False
) -> tuple[int, int, bool]:
    """Evaluate both sides of the sliding-window counting inequality.

    ``a(n)`` counts the members of ``A`` among rounds ``n - tau .. n - 1``
    (``n - tau + 1 .. n`` when ``inclusive``); the left side counts
    ``n <= T`` in ``A`` with ``a(n) <= s`` (``< s`` when ``strict``) and the
    right side is ``s * ceil(T / tau)``.

    With the default reading the inequality can fail: a block of ``tau``
    rounds may hold ``s + 1`` qualifying members (``A = {1, 2}``,
    ``tau = 10``, ``s = 1``, ``T = 10`` gives ``2 > 1``).  The strict and the
    inclusive variants are the provable forms.
    """
    tau = _check_tau(tau)
    T = int(T)
    ind = np.zeros(T + 1, dtype=np.int64)
    for a in A:
        if a < 1:
            raise ParameterError(f"A must contain positive integers, got {a}")
        if a <= T:
            ind[a] = 1
    prefix = np.cumsum(ind)  # prefix[n] = |A ∩ 1..n|
    n = np.arange(1, T + 1)
    if inclusive:
        a_n = prefix[n] - prefix[np.maximum(n - tau, 0)]
    else:
        a_n = prefix[n - 1] - prefix[np.maximum(n - tau - 1, 0)]
    ok = a_n < s if strict else a_n <= s
    lhs = int(np.sum(ind[1:] & ok))
    rhs = int(s) * math.ceil(T / tau)
    return lhs, rhs, lhs <= rhs
