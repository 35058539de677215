"""Self-supervised losses over prediction entropies: entropy, match, match++."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_finite_scalar

SIMPLEX_ATOL = 1e-9


@dataclass(frozen=True)
class MatchConfig:
    """Entropy filter threshold (nats) for the filtered/weighted match loss.

    Samples with entropy >= lambda_threshold are dropped; below it they are
    up-weighted by exp(2*(lambda - z)).  Default scales the common
    0.40 * ln(#classes) rule to the binary case.
    """

    lambda_threshold: float = 0.4 * math.log(2.0)

    def __post_init__(self):
        if not self.lambda_threshold > 0.0:
            raise ValueError(
                f"lambda_threshold must be positive, got {self.lambda_threshold}"
            )


def entropy(probs):
    """Shannon entropy of a probability vector, in nats; 0*log(0) counts as 0."""
    p = np.asarray(probs, dtype=float).ravel()
    if p.size < 2:
        raise ValueError(f"need at least 2 class probabilities, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be finite")
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > SIMPLEX_ATOL:
        raise ValueError(f"probabilities must sum to 1, got {p.sum()}")
    nonzero = p[p > 0.0]
    return float(-np.sum(nonzero * np.log(nonzero)))


def match_loss(z, z_tilde):
    """Squared matching loss (z - z_tilde)^2 / 2."""
    z = check_finite_scalar(z, "z")
    z_tilde = check_finite_scalar(z_tilde, "z_tilde")
    diff = z - z_tilde
    return 0.5 * diff * diff


def match_pp_loss(z, z_tilde, config):
    """Match loss filtered to z < lambda and weighted by exp(2*(lambda - z))."""
    z = check_finite_scalar(z, "z")
    lam = config.lambda_threshold
    if z >= lam:
        return 0.0
    return match_loss(z, z_tilde) * math.exp(2.0 * (lam - z))
