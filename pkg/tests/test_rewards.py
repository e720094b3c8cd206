import json
import math

import numpy as np
import pytest

from swbandits.analysis import compute_breakpoints, verify_abrupt_assumption
from swbandits.distributions import RngStream
from swbandits.errors import ConfigurationError, ParameterError
from swbandits.rewards import (
    Family,
    RewardTrajectory,
    figure2_environment,
    figure3_environment,
    figure4_environment,
    load_trajectory,
    make_crossing_sinusoid,
    make_environment,
    make_lipschitz_smooth,
    make_piecewise_constant,
    optimal_arm,
    sample_reward,
    save_trajectory,
)


def swap_env(T=100):
    return make_piecewise_constant(2, T, [51], [(0.9, 0.1), (0.1, 0.9)])


def test_piecewise_constant_construction():
    traj = swap_env()
    assert traj.mean(0, 50) == 0.9 and traj.mean(0, 51) == 0.1
    assert traj.K == 2 and traj.T == 100


def test_stationary_when_no_boundaries():
    traj = make_piecewise_constant(3, 50, [], [(0.2, 0.5, 0.7)])
    assert np.all(traj.means == traj.means[:, :1])


def test_trajectory_is_read_only():
    traj = swap_env()
    with pytest.raises(ValueError):
        traj.means[0, 0] = 0.5


@pytest.mark.parametrize(
    "bounds,means",
    [([0], [(0.1, 0.2), (0.2, 0.1)]), ([60, 40], [(0.1, 0.2)] * 3), ([51], [(0.1, 0.2)]), ([51], [(0.1,), (0.2,)])],
)
def test_piecewise_constant_errors(bounds, means):
    with pytest.raises(ParameterError):
        make_piecewise_constant(2, 100, bounds, means)


def test_bernoulli_range_enforced():
    with pytest.raises(ParameterError):
        make_piecewise_constant(2, 10, [], [(1.2, 0.1)])
    # sub-Gaussian means are unrestricted
    make_piecewise_constant(2, 10, [], [(1.2, -3.0)], Family.subgaussian(1.0))


def test_needs_two_arms():
    with pytest.raises(ParameterError):
        RewardTrajectory(np.zeros((1, 10)))


def test_figure4_has_two_breakpoints():
    traj = figure4_environment()
    rounds, ups = compute_breakpoints(traj)
    assert ups == 2
    assert all(v.passed for v in verify_abrupt_assumption(traj, rounds[:ups]))


def test_figure_environments_pass_abrupt_assumption():
    for make in (figure2_environment, figure3_environment, figure4_environment):
        traj = make()
        rounds, ups = compute_breakpoints(traj)
        assert ups >= 1
        assert all(v.passed for v in verify_abrupt_assumption(traj, rounds[:ups])), make.__name__


def test_crossing_sinusoid_crossings():
    traj = make_crossing_sinusoid(3000, 0.4, 2000)
    diff = traj.means[0] - traj.means[1]
    # sign changes of the mean difference happen at t = 1000 and 2000
    t = np.arange(1, 3001)
    assert np.all(diff[(t > 1) & (t < 1000)] > 0)
    assert np.all(diff[(t > 1000) & (t < 2000)] < 0)
    assert np.all(diff[(t > 2000) & (t < 3000)] > 0)
    assert np.max(np.abs(diff[[999, 1999, 2999]])) < 1e-12


def test_crossing_sinusoid_degenerate_and_lipschitz():
    flat = make_crossing_sinusoid(100, 0.0, 50)
    assert np.all(flat.means == 0.5)
    traj = make_crossing_sinusoid(3000, 0.4, 2000)
    assert traj.lipschitz_constant() <= 2 * math.pi * 0.4 / 2000 + 1e-12
    with pytest.raises(ParameterError):
        make_crossing_sinusoid(100, 0.7, 50)


def test_lipschitz_smooth_shapes():
    traj, drift = make_lipschitz_smooth(2, 1000, 0.0, 0.2)
    assert drift == 0.0 and np.all(traj.means == traj.means[:, :1])
    traj, drift = make_lipschitz_smooth(2, 1000, 0.0005, 0.1, shape="ramps")
    assert drift <= 0.0005
    assert np.all(np.diff(traj.means[1] - traj.means[0]) > 0)
    traj, drift = make_lipschitz_smooth(2, 1000, 0.002, 0.3, shape="parallel", period=500)
    assert drift <= 0.002
    assert np.allclose(traj.means[1] - traj.means[0], 0.3)
    traj, drift = make_lipschitz_smooth(2, 4000, 2 * math.pi * 0.4 / 2000, 0.0, shape="sinusoid", period=2000)
    assert drift == pytest.approx(0.00126, abs=1e-5)


def test_lipschitz_smooth_errors():
    with pytest.raises(ParameterError):
        make_lipschitz_smooth(2, 100, -1, 0.1)
    with pytest.raises(ParameterError):
        make_lipschitz_smooth(2, 100, 0.001, 0.1, shape="zigzag")
    with pytest.raises(ParameterError):
        make_lipschitz_smooth(2, 10000, 0.01, 0.1, shape="ramps")


def test_sample_reward_degenerate():
    rng = RngStream(0)
    ones = make_piecewise_constant(2, 5, [], [(1.0, 0.0)])
    assert all(sample_reward(ones, 0, 3, rng) == 1.0 for _ in range(200))
    exact = make_piecewise_constant(2, 5, [], [(0.7, 0.2)], Family.subgaussian(0.0))
    assert sample_reward(exact, 0, 1, rng) == 0.7


@pytest.mark.parametrize("family", [None, Family.subgaussian(0.5), Family.subgaussian(0.5, "bounded")])
def test_sample_reward_unbiased(family):
    traj = make_piecewise_constant(2, 5, [], [(0.3, 0.6)], family)
    rng = RngStream(11)
    x = np.array([traj.realize(0.3, v) for v in traj.draw_noise(rng, 100_000)])
    assert abs(x.mean() - 0.3) < 0.01
    if family is not None:
        # declared proxy variance bounds the actual variance
        assert x.var() <= family.proxy_variance * 1.02


def test_bounded_noise_support():
    fam = Family.subgaussian(0.25, "bounded")
    traj = make_piecewise_constant(2, 5, [], [(0.0, 0.0)], fam)
    x = np.array([traj.realize(0.0, v) for v in traj.draw_noise(RngStream(2), 10_000)])
    assert x.min() >= -0.5 and x.max() <= 0.5


def test_sample_reward_index_errors():
    with pytest.raises(IndexError):
        sample_reward(swap_env(), 2, 1, RngStream(0))
    with pytest.raises(IndexError):
        sample_reward(swap_env(), 0, 101, RngStream(0))


def test_optimal_arm():
    stat = make_piecewise_constant(2, 10, [], [(0.9, 0.5)])
    assert all(optimal_arm(stat, t) == 0 for t in range(1, 11))
    traj = swap_env()
    assert optimal_arm(traj, 50) == 0 and optimal_arm(traj, 51) == 1
    tie = make_piecewise_constant(2, 10, [], [(0.5, 0.5)])
    assert optimal_arm(tie, 4) == 0


def test_family_roundtrip():
    for fam in (Family(), Family.subgaussian(2.0, "bounded")):
        assert Family.from_dict(fam.to_dict()) == fam
    with pytest.raises(ParameterError):
        Family("cauchy")


def test_trajectory_file_roundtrip(tmp_path):
    traj = figure3_environment(300, Family.subgaussian(0.5))
    save_trajectory(traj, tmp_path / "t.csv")
    back = load_trajectory(tmp_path / "t.csv")
    assert np.array_equal(back.means, traj.means)
    assert back.family == traj.family
    assert back.fingerprint() == traj.fingerprint()


def test_trajectory_file_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="nope.csv"):
        load_trajectory(tmp_path / "nope.csv")
    (tmp_path / "a.csv").write_text("t,mu_1,mu_2\n1,0.5,0.5\n3,0.5,0.5\n")
    (tmp_path / "a.json").write_text(json.dumps({"family": "bernoulli"}))
    with pytest.raises(ConfigurationError, match="without gaps"):
        load_trajectory(tmp_path / "a.csv")
    (tmp_path / "b.csv").write_text("t,mu_1,mu_2\n1,0.5,0.5\n")
    with pytest.raises(ConfigurationError, match="b.json"):
        load_trajectory(tmp_path / "b.csv")


def test_make_environment(tmp_path):
    traj = make_environment({"kind": "piecewise_constant", "K": 2, "T": 100, "boundaries": [51],
                             "means": [[0.9, 0.1], [0.1, 0.9]]})
    assert np.array_equal(traj.means, swap_env().means)
    save_trajectory(traj, tmp_path / "e.csv")
    again = make_environment({"kind": "custom_file", "path": "e.csv"}, base_dir=tmp_path)
    assert again.fingerprint() == traj.fingerprint()
    with pytest.raises(ConfigurationError):
        make_environment({"kind": "piecewise_constant", "K": 2})
    with pytest.raises(ConfigurationError):
        make_environment({"kind": "mystery"})
