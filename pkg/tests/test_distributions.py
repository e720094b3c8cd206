import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from swbandits.distributions import (
    RngStream,
    beta_binomial_identity_gap,
    beta_cdf,
    binomial_cdf,
    derive_seed,
    sample_bernoulli,
    sample_beta,
    sample_gaussian,
)
from swbandits.errors import ParameterError


def test_stream_reproducible_and_keyed():
    a, b = RngStream(42, 3, "policy"), RngStream(42, 3, "policy")
    assert [sample_gaussian(0.0, 1.0, a) for _ in range(10)] == [sample_gaussian(0.0, 1.0, b) for _ in range(10)]
    c, d = RngStream(42, 3, "policy"), RngStream(42, 3, "env")
    assert [c.uniform() for _ in range(5)] != [d.uniform() for _ in range(5)]


def test_derive_leaves_parent_untouched():
    a, b = RngStream(1), RngStream(1)
    a.derive("child").uniform()
    assert a.uniform() == b.uniform()
    assert RngStream(1).derive(5).uniform() == RngStream(1, 5).uniform()


def test_derive_seed_stable():
    assert derive_seed(7, "tau", 10) == derive_seed(7, "tau", 10)
    assert derive_seed(7, "tau", 10) != derive_seed(7, "tau", 11)


def test_bad_seed():
    with pytest.raises(ParameterError):
        RngStream(-1)


def test_beta_uniform_mean():
    rng = RngStream(0)
    x = np.array([sample_beta(1, 1, rng) for _ in range(100_000)])
    assert abs(x.mean() - 0.5) < 0.005


def test_beta_matches_distribution():
    rng = RngStream(1)
    x = np.array([sample_beta(2.5, 7.0, rng) for _ in range(20_000)])
    assert stats.kstest(x, stats.beta(2.5, 7.0).cdf).pvalue > 1e-3


@pytest.mark.parametrize("a,b", [(0, 1), (1, -2), (math.inf, 1), (math.nan, 1)])
def test_beta_domain(a, b):
    with pytest.raises(ParameterError):
        sample_beta(a, b, RngStream(0))


def test_gaussian_moments_and_domain():
    rng = RngStream(2)
    x = np.array([sample_gaussian(1.5, 4.0, rng) for _ in range(50_000)])
    assert abs(x.mean() - 1.5) < 0.03
    assert abs(x.var() - 4.0) < 0.1
    with pytest.raises(ParameterError):
        sample_gaussian(0.0, 0.0, rng)


def test_bernoulli():
    rng = RngStream(3)
    assert all(sample_bernoulli(1.0, rng) == 1 for _ in range(1000))
    assert all(sample_bernoulli(0.0, rng) == 0 for _ in range(1000))
    x = np.array([sample_bernoulli(0.3, rng) for _ in range(100_000)])
    assert abs(x.mean() - 0.3) < 0.01
    with pytest.raises(ParameterError):
        sample_bernoulli(1.2, rng)


def test_subgaussian_tail_bound():
    # Hoeffding-type tail for the sample mean of n unit-variance Gaussians:
    # P(|mean| >= eps) <= 2 exp(-n eps^2 / 2)
    rng = np.random.default_rng(4)
    n, eps = 20, 0.5
    means = rng.standard_normal((200_000, n)).mean(axis=1)
    assert np.mean(np.abs(means) >= eps) <= 2 * math.exp(-n * eps**2 / 2)


def test_beta_cdf_examples():
    assert beta_cdf(1, 1, 0.3) == pytest.approx(0.3, abs=1e-15)
    assert beta_cdf(2, 1, 0.5) == pytest.approx(0.25, abs=1e-15)
    quad, _ = integrate.quad(lambda u: u**4 * (1 - u) ** 6, 0, 0.42, epsabs=1e-14, epsrel=1e-14)
    assert beta_cdf(5, 7, 0.42) == pytest.approx(quad / special.beta(5, 7), abs=1e-9)
    assert beta_cdf(3, 4, 0.0) == 0.0 and beta_cdf(3, 4, 1.0) == 1.0


def test_beta_cdf_domain():
    with pytest.raises(ParameterError):
        beta_cdf(1, 1, 1.5)
    with pytest.raises(ParameterError):
        beta_cdf(0, 1, 0.5)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.05, 300), st.floats(0.05, 300), st.floats(0, 1),
)
def test_beta_cdf_against_scipy(a, b, y):
    assert beta_cdf(a, b, y) == pytest.approx(special.betainc(a, b, y), abs=1e-10)


def test_binomial_cdf_examples():
    assert binomial_cdf(1, 0.3, 0) == pytest.approx(0.7)
    assert binomial_cdf(2, 0.5, 1) == pytest.approx(0.75)
    assert binomial_cdf(10, 0.3, 10) == 1.0 and binomial_cdf(10, 0.3, 15) == 1.0
    assert binomial_cdf(10, 0.3, -1) == 0.0
    assert binomial_cdf(0, 0.3, 0) == 1.0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 3000), st.floats(0, 1), st.integers(-2, 3002))
def test_binomial_cdf_against_scipy(n, p, k):
    assert binomial_cdf(n, p, k) == pytest.approx(stats.binom.cdf(k, n, p), abs=1e-10)


def test_binomial_domain():
    with pytest.raises(ParameterError):
        binomial_cdf(-1, 0.5, 0)
    with pytest.raises(ParameterError):
        binomial_cdf(3, 1.5, 0)


def test_identity_examples():
    assert beta_binomial_identity_gap(1, 1, 0.3) <= 1e-15
    assert beta_binomial_identity_gap(2, 1, 0.5) <= 1e-12
    with pytest.raises(ParameterError):
        beta_binomial_identity_gap(1.5, 1, 0.3)
