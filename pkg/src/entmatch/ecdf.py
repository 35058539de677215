"""Empirical CDF of scalar samples with linear interpolation and a pseudo-inverse.

The k-th smallest of n calibration samples carries ordinate k/n; evaluation is
piecewise-linear between sample points, clamped to 0 below the smallest sample
and to 1 above the largest.  Tied samples collapse to a single knot holding the
highest ordinate, so the interpolated CDF is strictly increasing on the knot
range and the pseudo-inverse below is its exact functional inverse (equivalent
to resolving flat quantile segments to their leftmost point).
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_finite_scalar, check_sample_array

ARTIFACT_HEADER = "# n="


class EmpiricalCdf(TransformerMixin, BaseEstimator):
    """Calibrated distribution of scalar values (entropies, typically, in nats).

    ``fit`` sorts the calibration samples; ``transform`` maps values through the
    interpolated CDF onto [0, 1]; ``inverse_transform`` maps quantiles back onto
    the sample range.  The estimator is immutable after ``fit`` and safe to share
    across threads.

    Attributes
    ----------
    knots_ : ndarray of shape (n_samples_,)
        The calibration samples, sorted ascending (ties retained).
    n_samples_ : int
        Number of calibration samples.
    """

    def fit(self, X, y=None):
        """Calibrate on at least two finite samples; input order is irrelevant."""
        samples = check_sample_array(X, name="calibration samples", min_samples=2)
        self.knots_ = np.sort(samples)
        self.n_samples_ = int(samples.size)
        grid, counts = np.unique(self.knots_, return_counts=True)
        self._grid = grid
        self._ordinates = np.cumsum(counts) / self.n_samples_
        return self

    def _check_fitted(self):
        if not hasattr(self, "knots_"):
            raise NotFittedError("EmpiricalCdf must be fitted before use")

    def transform(self, X):
        """Evaluate the interpolated CDF at each value; returns quantiles in [0, 1]."""
        self._check_fitted()
        values = check_sample_array(X, name="X")
        return np.interp(values, self._grid, self._ordinates, left=0.0, right=1.0)

    def evaluate(self, z):
        """Scalar CDF evaluation F(z) in [0, 1]."""
        self._check_fitted()
        z = check_finite_scalar(z, "z")
        return float(np.interp(z, self._grid, self._ordinates, left=0.0, right=1.0))

    def inverse_transform(self, U):
        """Map quantiles in [0, 1] back to values; 0 and 1 hit the extreme knots."""
        self._check_fitted()
        u = check_sample_array(U, name="U")
        if u.size and (u.min() < 0.0 or u.max() > 1.0):
            raise ValueError("quantiles must lie in [0, 1]")
        return np.interp(u, self._ordinates, self._grid,
                         left=self._grid[0], right=self._grid[-1])

    def quantile(self, u):
        """Scalar pseudo-inverse: the smallest z with F(z) >= u."""
        self._check_fitted()
        u = check_finite_scalar(u, "u")
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"u must lie in [0, 1], got {u}")
        return float(np.interp(u, self._ordinates, self._grid,
                               left=self._grid[0], right=self._grid[-1]))

    def save(self, path):
        """Write the artifact: a header line recording n, then one knot per line."""
        self._check_fitted()
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"{ARTIFACT_HEADER}{self.n_samples_}\n")
            for knot in self.knots_:
                fh.write(f"{knot:.17g}\n")

    @classmethod
    def load(cls, path):
        """Read an artifact written by :meth:`save`."""
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if not header.startswith(ARTIFACT_HEADER):
                raise ValueError(f"{path}: missing '{ARTIFACT_HEADER}' header line")
            try:
                n = int(header[len(ARTIFACT_HEADER):])
            except ValueError as exc:
                raise ValueError(f"{path}: malformed header {header!r}") from exc
            values = [float(line) for line in fh if line.strip()]
        if len(values) != n:
            raise ValueError(f"{path}: header says n={n} but found {len(values)} values")
        return cls().fit(values)
