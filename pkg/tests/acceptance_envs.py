"""Environments shared by the acceptance suite and the pilot script."""
from swbandits.rewards import Family, make_piecewise_constant


def stationary_bernoulli(T=20000):
    return make_piecewise_constant(2, T, [], [(0.9, 0.5)])


def abrupt_bernoulli(T=10000, phase=2500):
    bounds = list(range(phase + 1, T + 1, phase))
    means = [(0.9, 0.1) if k % 2 == 0 else (0.1, 0.9) for k in range(len(bounds) + 1)]
    return make_piecewise_constant(2, T, bounds, means)


def abrupt_gaussian(T=10000, phase=2500):
    bounds = list(range(phase + 1, T + 1, phase))
    means = [(1.0, -1.0) if k % 2 == 0 else (-1.0, 1.0) for k in range(len(bounds) + 1)]
    return make_piecewise_constant(2, T, bounds, means, Family.subgaussian(1.0))
