"""Tests for the interpolated empirical CDF and its pseudo-inverse."""

import numpy as np
import pytest
from scipy.stats import ks_2samp
from sklearn.exceptions import NotFittedError

from entmatch.ecdf import EmpiricalCdf


def fit(samples):
    return EmpiricalCdf().fit(samples)


# --- construction ---

def test_fit_sorts_samples():
    cdf = fit([0.1, 0.3, 0.2])
    np.testing.assert_array_equal(cdf.knots_, [0.1, 0.2, 0.3])
    assert cdf.n_samples_ == 3


def test_fit_allows_ties():
    cdf = fit([0.5, 0.5])
    np.testing.assert_array_equal(cdf.knots_, [0.5, 0.5])
    assert cdf.evaluate(0.5) == 1.0
    assert cdf.quantile(0.3) == 0.5


def test_fit_holdout_scale():
    rng = np.random.default_rng(0)
    cdf = fit(rng.random(2500))
    assert cdf.n_samples_ == 2500


def test_fit_rejects_fewer_than_two_samples():
    with pytest.raises(ValueError, match="at least 2"):
        fit([0.7])


def test_fit_rejects_non_finite():
    with pytest.raises(ValueError, match="non-finite"):
        fit([0.1, np.nan, 0.3])


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        EmpiricalCdf().evaluate(0.5)


# --- forward evaluation ---

def test_eval_at_sample_point():
    assert fit([1, 2, 3, 4]).evaluate(2.0) == 0.5


def test_eval_clamps_below_and_above():
    cdf = fit([1, 2, 3, 4])
    assert cdf.evaluate(0.5) == 0.0
    assert cdf.evaluate(9.0) == 1.0


def test_eval_linear_interpolation():
    assert fit([1, 2, 3, 4]).evaluate(2.5) == pytest.approx(0.625, abs=1e-15)


def test_eval_rejects_non_finite():
    with pytest.raises(ValueError):
        fit([1, 2, 3]).evaluate(float("inf"))


def test_transform_matches_scalar_evaluate():
    rng = np.random.default_rng(1)
    cdf = fit(rng.normal(size=50))
    zs = rng.normal(size=20)
    np.testing.assert_allclose(cdf.transform(zs), [cdf.evaluate(z) for z in zs])


def test_eval_monotone():
    rng = np.random.default_rng(2)
    cdf = fit(rng.normal(size=200))
    zs = np.sort(rng.normal(scale=2.0, size=500))
    u = cdf.transform(zs)
    assert np.all(np.diff(u) >= 0.0)


# --- pseudo-inverse ---

def test_quantile_inverts_eval_example():
    cdf = fit([1, 2, 3, 4])
    assert cdf.quantile(0.5) == 2.0
    assert cdf.quantile(1.0) == 4.0
    assert cdf.quantile(0.625) == pytest.approx(2.5, abs=1e-15)


def test_quantile_endpoints_hit_extreme_knots():
    cdf = fit([3.0, 1.0, 2.0])
    assert cdf.quantile(0.0) == 1.0
    assert cdf.quantile(1.0) == 3.0


def test_quantile_rejects_outside_unit_interval():
    cdf = fit([1, 2, 3])
    with pytest.raises(ValueError):
        cdf.quantile(1.5)
    with pytest.raises(ValueError):
        cdf.inverse_transform([-0.1, 0.5])


def test_quantile_resolves_ties_to_leftmost_consistent_value():
    # interpolated CDF of [1,2,2,3] rises to 0.75 at the tied knot; the smallest
    # z with F(z) >= 0.75 is the knot itself
    cdf = fit([1, 2, 2, 3])
    assert cdf.evaluate(2.0) == 0.75
    assert cdf.quantile(0.75) == 2.0
    assert cdf.quantile(0.75 + 1e-9) > 2.0


def test_quantile_monotone():
    rng = np.random.default_rng(3)
    cdf = fit(rng.normal(size=200))
    us = np.sort(rng.random(500))
    z = cdf.inverse_transform(us)
    assert np.all(np.diff(z) >= 0.0)


# --- pairing invariants ---

def test_galois_round_trip_at_knots():
    rng = np.random.default_rng(4)
    samples = rng.normal(size=300)  # continuous, ties have probability zero
    cdf = fit(samples)
    for z in cdf.knots_:
        assert abs(cdf.quantile(cdf.evaluate(z)) - z) <= 1e-12


def test_u_round_trip_on_interior():
    rng = np.random.default_rng(5)
    cdf = fit(rng.normal(size=400))
    us = rng.random(1000)
    z = cdf.inverse_transform(us)
    interior = (z > cdf.knots_[0]) & (z < cdf.knots_[-1])
    back = cdf.transform(z[interior])
    assert np.max(np.abs(back - us[interior])) <= 1e-12


def test_transformed_fresh_samples_look_uniform():
    # two-sample KS between fresh and calibration samples at level 0.01; the
    # one-sample test against Uniform(0,1) ignores the calibration ECDF's own
    # noise and over-rejects at these sizes
    passes = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        calibration = np.abs(rng.normal(size=10000))
        fresh = np.abs(rng.normal(size=10000))
        if ks_2samp(fresh, calibration).pvalue >= 0.01:
            passes += 1
    assert passes >= 95


# --- serialization ---

def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    cdf = fit(rng.random(100))
    path = tmp_path / "cdf.txt"
    cdf.save(path)
    loaded = EmpiricalCdf.load(path)
    np.testing.assert_array_equal(loaded.knots_, cdf.knots_)
    assert loaded.n_samples_ == cdf.n_samples_
    header = path.read_text().splitlines()[0]
    assert header == "# n=100"


def test_load_rejects_missing_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0.1\n0.2\n")
    with pytest.raises(ValueError, match="header"):
        EmpiricalCdf.load(path)


def test_load_rejects_count_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# n=3\n0.1\n0.2\n")
    with pytest.raises(ValueError, match="n=3"):
        EmpiricalCdf.load(path)
