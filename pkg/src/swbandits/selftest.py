"""Fast invariant suite behind ``swbandits selftest``.

Each check returns a short detail string or raises ``AssertionError``.
Output is deterministic: fixed seeds, no timings.
"""
from __future__ import annotations

import sys
from typing import Callable

import numpy as np

from .analysis import compute_delta_tau, compute_f_tau_prime, window_lemma_check
from .distributions import RngStream, beta_binomial_identity_gap
from .harness import regret_csv_text, run_episode, run_replications
from .rewards import make_piecewise_constant
from .window import WindowStats, brute_force_recompute

__all__ = ["CHECKS", "run_selftest"]


def check_beta_binomial() -> str:
    ys = [round(0.05 * k, 2) for k in range(1, 20)]
    worst = max(beta_binomial_identity_gap(a, b, y) for a in range(1, 21) for b in range(1, 21) for y in ys)
    assert worst <= 1e-9, f"max gap {worst:.3e} > 1e-9"
    return "max gap <= 1e-9 on alpha,beta in 1..20, y in 0.05..0.95"


def check_window_stats() -> str:
    rng = np.random.default_rng(7)
    K, steps = 5, 1500
    for tau in (1, 7, 64):
        ws = WindowStats(K, tau)
        history = []
        for t in range(1, steps + 1):
            counts, sums = brute_force_recompute(history, t, tau, K)
            assert np.array_equal(ws.counts(), counts), f"tau={tau}, round {t}: counts {ws.counts()} != {counts}"
            err = np.max(np.abs(ws.sums() - sums))
            assert err <= 1e-12, f"tau={tau}, round {t}: sum error {err:.3e}"
            arm, reward = int(rng.integers(K)), float(rng.uniform())
            ws.record(arm, reward)
            history.append((arm, reward))
    return f"incremental == brute force for tau in (1, 7, 64), {steps} rounds each"


def check_window_lemma() -> str:
    rng = np.random.default_rng(11)
    printed_violations = 0
    for _ in range(200):
        T = int(rng.integers(1, 501))
        tau = int(rng.integers(1, T + 1))
        s = int(rng.integers(0, tau + 1))
        A = np.flatnonzero(rng.uniform(size=T) < rng.uniform()) + 1
        for kw in ({"strict": True}, {"inclusive": True}):
            lhs, rhs, ok = window_lemma_check(A, tau, s, T, **kw)
            assert ok, f"{kw} form violated: T={T} tau={tau} s={s} lhs={lhs} rhs={rhs}"
        printed_violations += not window_lemma_check(A, tau, s, T)[2]
    lhs, rhs, ok = window_lemma_check(range(1, 101), 10, 10, 100)
    assert (lhs, rhs, ok) == (100, 100, True), f"edge case gave {lhs}, {rhs}"
    return (f"strict and inclusive forms hold on 200 instances; edge case 100 == 100; "
            f"non-strict exclusive form fails on {printed_violations}/200 (informational)")


def check_structure() -> str:
    rng = np.random.default_rng(3)
    for _ in range(5):
        T, K = int(rng.integers(20, 300)), int(rng.integers(2, 4))
        traj = make_piecewise_constant(K, T, sorted(rng.choice(np.arange(2, T), 2, replace=False).tolist()),
                                       rng.uniform(size=(3, K)).round(3).tolist())
        for tau in (1, 10, 100):
            a = compute_f_tau_prime(traj, tau, method="brute")
            b = compute_f_tau_prime(traj, tau, method="filter")
            assert np.array_equal(a, b), f"F_tau' methods disagree (T={T}, tau={tau})"
            da = compute_delta_tau(traj, tau, method="brute")
            db = compute_delta_tau(traj, tau, method="filter")
            assert da == db, f"Delta_tau methods disagree: {da} vs {db}"
    return "filter-based F_tau' and Delta_tau match the direct scan"


def check_determinism() -> str:
    a, b = RngStream(5, 1, "policy"), RngStream(5, 1, "policy")
    assert [a.uniform() for _ in range(10)] == [b.uniform() for _ in range(10)], "RngStream not reproducible"
    traj = make_piecewise_constant(2, 400, [200], [(0.8, 0.2), (0.2, 0.8)])
    cfg = {"policy": "beta_swts", "tau": 50}
    r1, r2 = run_episode(cfg, traj, 9, 0), run_episode(cfg, traj, 9, 0)
    assert np.array_equal(r1.arms, r2.arms), "episode pull sequence not reproducible"
    c1 = regret_csv_text(run_replications(cfg, traj, 4, 9))
    c2 = regret_csv_text(run_replications(cfg, traj, 4, 9))
    assert c1 == c2, "regret CSV not byte-identical across reruns"
    return "streams, episodes and regret CSV reproduce exactly"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("beta-binomial", check_beta_binomial),
    ("window-stats", check_window_stats),
    ("window-lemma", check_window_lemma),
    ("structure-oracle", check_structure),
    ("determinism", check_determinism),
]


def run_selftest(out=None) -> int:
    """Run every check, print one line each; return 0 iff all pass."""
    out = out or sys.stdout
    failed = []
    for name, fn in CHECKS:
        try:
            detail = fn()
            print(f"PASS {name}: {detail}", file=out)
        except Exception as exc:  # any failure, including crashes, fails the check
            failed.append(name)
            print(f"FAIL {name}: {type(exc).__name__}: {exc}", file=out)
    print(f"selftest: {len(CHECKS) - len(failed)}/{len(CHECKS)} checks passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""), file=out)
    return 1 if failed else 0
