"""
Smoothly changing environments
==============================

When means drift by at most ``sigma`` per round, a window of length
``tau`` sees each mean move by at most ``sigma * tau``.  Wherever the arms
are at least ``Delta'`` apart the ranking inside the window is then
unambiguous, with a gap of at least ``Delta' - 2 sigma tau``.
"""
import math

from swbandits.analysis import compute_delta_tau, compute_f_delta_prime, compute_f_tau_prime
from swbandits.harness import run_replications
from swbandits.rewards import make_crossing_sinusoid

T = 6000
traj = make_crossing_sinusoid(T, amplitude=0.4, period=4000.5)
sigma = traj.lipschitz_constant()
print(f"audited Lipschitz constant {sigma:.5f} (2 pi a / period = {2 * math.pi * 0.4 / 4000.5:.5f})")

delta_prime = 0.1
for tau in (20, 50, 100):
    f_prime = compute_f_tau_prime(traj, tau)
    close = compute_f_delta_prime(traj, delta_prime)
    gap = compute_delta_tau(traj, tau, f_prime | close)
    print(
        f"tau={tau:>3}: |F_tau'|={f_prime.sum():4d} inside |F_delta'|={close.sum()}: {not (f_prime & ~close).any()}; "
        f"Delta_tau={gap:.4f} >= {delta_prime - 2 * sigma * tau:.4f}"
    )

# %%
for cfg in ({"policy": "beta_swts", "tau": 100}, {"policy": "beta_swts", "tau": 1000}, {"policy": "stationary_ts"}):
    agg = run_replications(cfg, traj, 10, base_seed=5)
    print(f"{agg.label:>22}: final regret {agg.final_regret:7.1f} +/- {agg.final_stderr:.1f}")
