"""One-dimensional binary Gaussian classifier with a scalar boundary parameter.

The classes are N(omega - 1, 1) and N(omega + 1, 1) with equal priors in the
frame of the current boundary; the Bayes posterior of the positive class is
sigmoid(2*(x - omega)).  The only learnable parameter is the boundary offset
omega, which plays the role the normalization-layer parameters play for a deep
network: self-training moves it to reshape the model's entropy distribution.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_finite_scalar
from .ecdf import EmpiricalCdf
from .transport import oracle_transport

ACCURACY_STREAM_KEY = 104729
TARGET_STREAM_KEY = 104717


@dataclass(frozen=True)
class ToyModel:
    """Scalar decision-boundary offset; the pre-trained model is omega = 0."""

    omega: float = 0.0

    def __post_init__(self):
        check_finite_scalar(self.omega, "omega")


@dataclass(frozen=True)
class GaussianScenario:
    """Two-Gaussian data source: x | y ~ N(y + shift, 1), y uniform on {-1, +1}."""

    shift: float = 0.0
    n_per_class: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.n_per_class < 1:
            raise ValueError(f"n_per_class must be >= 1, got {self.n_per_class}")

    def rng(self, key=0):
        """Counter-based generator; distinct keys give independent streams."""
        return np.random.Generator(np.random.Philox(np.random.SeedSequence((self.seed, key))))

    def sample(self, rng=None, n_per_class=None):
        """Draw a shuffled sample of exactly n_per_class points per class.

        Returns (x, y) with labels y in {-1, +1}.
        """
        if rng is None:
            rng = self.rng()
        n = self.n_per_class if n_per_class is None else int(n_per_class)
        y = np.repeat([-1.0, 1.0], n)
        x = rng.normal(0.0, 1.0, 2 * n) + y + self.shift
        order = rng.permutation(2 * n)
        return x[order], y[order]


def _binary_entropy_from_logit(t):
    """Entropy of (sigmoid(t), 1 - sigmoid(t)) in nats, stable for large |t|."""
    a = np.abs(t)
    q = np.exp(-a)
    return np.log1p(q) + a * q / (1.0 + q)


def predict_proba(model, x):
    """Class probabilities (p_minus, p_plus); p_plus = sigmoid(2*(x - omega))."""
    x = check_finite_scalar(x, "x")
    t = 2.0 * (x - model.omega)
    if t >= 0:
        p_plus = 1.0 / (1.0 + math.exp(-t))
    else:
        e = math.exp(t)
        p_plus = e / (1.0 + e)
    return (1.0 - p_plus, p_plus)


def model_entropy(model, x):
    """Prediction entropy at x, in nats: ln 2 at the boundary, -> 0 far from it.

    Accepts a scalar or an array of inputs.
    """
    if np.ndim(x) == 0:
        x = check_finite_scalar(x, "x")
        return float(_binary_entropy_from_logit(2.0 * (x - model.omega)))
    x = np.asarray(x, dtype=float)
    return _binary_entropy_from_logit(2.0 * (x - model.omega))


def _entropy_grad_parts(model, x):
    """(z, dz/domega) at x; dz/domega = 2*t*p*(1-p) with t the logit."""
    t = 2.0 * (x - model.omega)
    a = abs(t)
    q = math.exp(-a)
    z = math.log1p(q) + a * q / (1.0 + q)
    p_times_1mp = q / ((1.0 + q) * (1.0 + q))
    return z, 2.0 * t * p_times_1mp


def grad_match(model, x, z_tilde):
    """d/domega of the plain match loss, holding the target z_tilde constant."""
    x = check_finite_scalar(x, "x")
    z_tilde = check_finite_scalar(z_tilde, "z_tilde")
    z, dz_domega = _entropy_grad_parts(model, x)
    return (z - z_tilde) * dz_domega


def grad_match_pp(model, x, z_tilde, config):
    """d/domega of the filtered/weighted match loss, target held constant.

    Zero for z >= lambda; below it both the quadratic term and the
    exp(2*(lambda - z)) weight depend on z, so
    dL/dz = w * ((z - z_tilde) - (z - z_tilde)^2).
    """
    x = check_finite_scalar(x, "x")
    z_tilde = check_finite_scalar(z_tilde, "z_tilde")
    lam = config.lambda_threshold
    z, dz_domega = _entropy_grad_parts(model, x)
    if z >= lam:
        return 0.0
    diff = z - z_tilde
    weight = math.exp(2.0 * (lam - z))
    return weight * (diff - diff * diff) * dz_domega


def sgd_step(model, batch, eta, config):
    """One step on the mean filtered-match gradient over (x, z_tilde) pairs."""
    batch = list(batch)
    if not batch:
        raise ValueError("batch must be non-empty")
    if eta < 0.0:
        raise ValueError(f"eta must be non-negative, got {eta}")
    mean_grad = sum(grad_match_pp(model, x, zt, config) for x, zt in batch) / len(batch)
    return ToyModel(model.omega - eta * mean_grad)


def risk_curve(scenario, omega_grid, loss_kind):
    """Monte-Carlo risk over a boundary grid, as (omega, risk) rows.

    loss_kind "entropy": mean prediction entropy on target samples.
    loss_kind "match-oracle": mean match loss against the exact transport of
    the target entropies onto the source entropy distribution, with the target
    CDF re-estimated at every omega (the entropy distribution moves with the
    boundary).  Target inputs are the source draws translated by the scenario
    shift, so the source CDF (original model on the untranslated draws) and the
    target entropies share their underlying randomness and the risk vanishes
    exactly where the distributions match.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.size == 0:
        raise ValueError("omega_grid must be non-empty")
    if loss_kind not in ("entropy", "match-oracle"):
        raise ValueError(f"unknown loss_kind {loss_kind!r}")

    x_target, _ = scenario.sample(rng=scenario.rng(TARGET_STREAM_KEY))
    rows = np.empty((omega_grid.size, 2))
    rows[:, 0] = omega_grid

    if loss_kind == "entropy":
        for i, omega in enumerate(omega_grid):
            rows[i, 1] = float(np.mean(model_entropy(ToyModel(omega), x_target)))
        return rows

    x_source = x_target - scenario.shift
    source_cdf = EmpiricalCdf().fit(model_entropy(ToyModel(0.0), x_source))
    for i, omega in enumerate(omega_grid):
        z = model_entropy(ToyModel(omega), x_target)
        target_cdf = EmpiricalCdf().fit(z)
        z_tilde = oracle_transport(source_cdf, target_cdf, z)
        rows[i, 1] = float(np.mean(0.5 * (z - z_tilde) ** 2))
    return rows


def evaluate_accuracy(model, scenario, n_samples=1_000_000):
    """Monte-Carlo accuracy of sign(x - omega) against the true labels."""
    rng = scenario.rng(ACCURACY_STREAM_KEY)
    y = rng.integers(0, 2, n_samples) * 2.0 - 1.0
    x = rng.normal(0.0, 1.0, n_samples) + y + scenario.shift
    pred = np.where(x >= model.omega, 1.0, -1.0)
    return float(np.mean(pred == y))


def bayes_accuracy():
    """Accuracy of the ideal boundary for unit-variance classes two apart: Phi(1)."""
    return 0.5 * (1.0 + math.erf(1.0 / math.sqrt(2.0)))
