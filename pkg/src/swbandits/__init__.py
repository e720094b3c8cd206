"""Sliding-window Thompson sampling for non-stationary multi-armed bandits.

Modules:

* ``distributions`` -- seeded random streams, Beta/Gaussian/Bernoulli
  samplers, Beta and Binomial CDFs
* ``rewards`` -- reward trajectories (K x T mean matrices) and generators
* ``window`` -- O(1) sliding-window sufficient statistics
* ``policies`` -- Beta-SWTS, gamma-SWGTS and baselines
* ``analysis`` -- breakpoints, phases, F_tau, Delta_tau, bound shapes
* ``harness`` -- episodes, replications, window sweeps
* ``cli`` -- the ``swbandits`` command
"""
__version__ = "0.1.0"

from .errors import ConfigurationError, ContractError, ParameterError
from .distributions import RngStream, beta_cdf, binomial_cdf, derive_seed
from .rewards import Family, RewardTrajectory, load_trajectory, save_trajectory
from .window import WindowStats
from .policies import BetaSWTS, GammaSWGTS, make_policy
from .harness import run_episode, run_replications, tau_sweep

__all__ = [
    "ConfigurationError",
    "ContractError",
    "ParameterError",
    "RngStream",
    "beta_cdf",
    "binomial_cdf",
    "derive_seed",
    "Family",
    "RewardTrajectory",
    "load_trajectory",
    "save_trajectory",
    "WindowStats",
    "BetaSWTS",
    "GammaSWGTS",
    "make_policy",
    "run_episode",
    "run_replications",
    "tau_sweep",
]
