"""Tests for quantile adaptation and one-dimensional transport."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import beta as beta_dist, ks_2samp

from entmatch.ecdf import EmpiricalCdf
from entmatch.toy_model import GaussianScenario, ToyModel, model_entropy
from entmatch.transport import adapt_u, oracle_transport, pseudo_entropy

LN2 = 0.6931471805599453


# --- adapted quantile Q ---

def test_adapt_u_identity_at_zero_epsilon():
    us = np.linspace(0.0, 1.0, 101)
    np.testing.assert_allclose(adapt_u(0.0, us), us, atol=0.0)


def test_adapt_u_arithmetic():
    assert adapt_u(1.0, 0.5) == pytest.approx(0.375, abs=1e-15)


def test_adapt_u_preserves_endpoints():
    for epsilon in np.linspace(-2.0, 2.0, 17):
        assert adapt_u(epsilon, 0.0) == 0.0
        assert adapt_u(epsilon, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_adapt_u_rejects_epsilon_outside_range():
    with pytest.raises(ValueError):
        adapt_u(2.5, 0.5)


def test_adapt_u_is_a_cdf_for_all_valid_epsilon():
    us = np.linspace(0.0, 1.0, 2001)
    for epsilon in np.linspace(-2.0, 2.0, 81):
        q = adapt_u(epsilon, us)
        assert q[0] == 0.0
        assert q[-1] == pytest.approx(1.0, abs=1e-15)
        assert np.all(np.diff(q) >= -1e-15)
        if abs(epsilon) < 2.0:
            assert np.all(np.diff(q) > 0.0)


def test_adapt_u_integrates_the_betting_density():
    # Q(u) must equal the integral over [0, u] of b(v) = 1 + eps*(v - 0.5)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        epsilon = rng.uniform(-2.0, 2.0)
        u = rng.random()
        integral, _ = quad(lambda v: 1.0 + epsilon * (v - 0.5), 0.0, u)
        assert abs(adapt_u(epsilon, u) - integral) <= 1e-8


# --- pseudo-entropy ---

def test_pseudo_entropy_examples():
    cdf = EmpiricalCdf().fit([1, 2, 3, 4])
    assert pseudo_entropy(cdf, 0.5) == 2.0
    assert pseudo_entropy(cdf, adapt_u(1.0, 0.5)) == pytest.approx(1.5, abs=1e-15)


def test_no_harm_identity_at_zero_epsilon():
    rng = np.random.default_rng(1)
    cdf = EmpiricalCdf().fit(rng.random(500) * LN2)
    # exact at knots
    for z in cdf.knots_[::25]:
        u = cdf.evaluate(z)
        assert abs(pseudo_entropy(cdf, adapt_u(0.0, u)) - z) <= 1e-12
    # and within interpolation tolerance between knots
    zs = rng.uniform(cdf.knots_[0], cdf.knots_[-1], 200)
    back = cdf.inverse_transform(adapt_u(0.0, cdf.transform(zs)))
    assert np.max(np.abs(back - zs)) <= 1e-12


# --- oracle transport map ---

def test_oracle_transport_identity_for_equal_distributions():
    samples = np.random.default_rng(2).normal(size=300)
    cdf = EmpiricalCdf().fit(samples)
    for z in cdf.knots_[::20]:
        assert oracle_transport(cdf, cdf, z) == pytest.approx(z, abs=1e-12)


def test_oracle_transport_undoes_translation():
    samples = np.sort(np.random.default_rng(3).normal(size=200))
    shift = 0.7
    source = EmpiricalCdf().fit(samples)
    target = EmpiricalCdf().fit(samples + shift)
    for z in target.knots_[::10]:
        assert oracle_transport(source, target, z) == pytest.approx(z - shift, abs=1e-10)


def test_oracle_transport_matches_source_distribution_monte_carlo():
    model = ToyModel(0.0)
    source_x, _ = GaussianScenario(shift=0.0, n_per_class=5000, seed=4).sample()
    target_x, _ = GaussianScenario(shift=1.0, n_per_class=5000, seed=5).sample()
    source_z = model_entropy(model, source_x)
    target_z = model_entropy(model, target_x)
    source_cdf = EmpiricalCdf().fit(source_z)
    target_cdf = EmpiricalCdf().fit(target_z)
    transported = oracle_transport(source_cdf, target_cdf, target_z)
    assert np.mean(np.abs(transported - target_z)) > 0.0
    assert ks_2samp(transported, source_z).statistic <= 0.02


def test_likelihood_ratio_bet_reproduces_oracle_transport():
    """Desk-scale equivalence: integrating the exact likelihood-ratio bet gives
    the same transport as composing the two CDFs, up to discretization.

    Known source/target entropy densities (scaled Betas on [0, ln 2]); both
    CDFs are represented on n deterministic quantile knots, the bet density is
    integrated on a uniform u-grid by the trapezoid rule.
    """
    n = 2000
    # exponents chosen so the density ratio stays bounded on (0, ln 2)
    source = beta_dist(2.0, 2.0, scale=LN2)
    target = beta_dist(3.0, 2.4, scale=LN2)
    ranks = np.arange(1, n + 1) / n
    source_cdf = EmpiricalCdf().fit(source.ppf(ranks))
    target_cdf = EmpiricalCdf().fit(np.clip(target.ppf(ranks), 0.0, LN2))

    u_grid = np.linspace(0.0, 1.0, n + 1)
    z_at_u = source.ppf(u_grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = target.pdf(z_at_u) / source.pdf(z_at_u)
    ratio = np.nan_to_num(ratio, nan=0.0, posinf=0.0)
    q_numeric = np.concatenate(
        [[0.0], np.cumsum(0.5 * (ratio[1:] + ratio[:-1]) * np.diff(u_grid))]
    )
    q_numeric = np.clip(q_numeric / q_numeric[-1], 0.0, 1.0)

    quantiles = (u_grid >= 0.01) & (u_grid <= 0.99)
    z_points = source_cdf.inverse_transform(u_grid[quantiles])
    oracle_q = target_cdf.transform(z_points)

    cell = max(1.0 / n, u_grid[1] - u_grid[0])
    assert np.max(np.abs(q_numeric[quantiles] - oracle_q)) <= 2.0 * cell

    z_bet = source_cdf.inverse_transform(q_numeric[quantiles])
    z_oracle = source_cdf.inverse_transform(oracle_q)
    assert np.max(np.abs(z_bet - z_oracle)) <= 2.0 * cell * 4.0  # |dF_s^-1/du| <~ 4
