"""
Choosing the window length
==========================

Short windows forget quickly but estimate poorly; long windows estimate
well but adapt slowly.  Sweeping ``tau`` on the abrupt environment shows
the resulting U shape, and the bound shape ``c1 * Upsilon * tau +
c2 * T log(tau) / (tau Delta^3)`` fitted to it has the same profile.
"""
import numpy as np

from swbandits.analysis import BoundShapeParams, compute_breakpoints, eval_bound_shape, fit_bound_constants
from swbandits.harness import tau_sweep
from swbandits.rewards import make_piecewise_constant

T = 10_000
traj = make_piecewise_constant(
    2, T, [2501, 5001, 7501], [(0.9, 0.1), (0.1, 0.9), (0.9, 0.1), (0.1, 0.9)]
)
_, upsilon = compute_breakpoints(traj)

taus = [10, 30, 100, 300, 1000, 3000, 10_000]
rows = tau_sweep({"policy": "beta_swts"}, traj, taus, n=10, base_seed=3)
for r in rows:
    print(f"tau={r.tau:>6}: regret {r.final_regret:8.1f} +/- {r.stderr:6.1f}   pulls {np.round(r.mean_pulls)}")

# %%
# Fit the two constants of the abrupt Beta bound shape to the sweep.
params = [BoundShapeParams("abrupt-beta", T=T, tau=t, delta=0.8, upsilon=upsilon) for t in taus]
c1, c2, _ = fit_bound_constants(params, [r.final_regret for r in rows])
print(f"fitted c1={c1:.3g}, c2={c2:.3g}")
for p, r in zip(params, rows):
    p.c1, p.c2 = c1, c2
    print(f"tau={p.tau:>6}: observed {r.final_regret:8.1f}   shape {eval_bound_shape(p):8.1f}")
