"""Quantile adaptation and one-dimensional transport to the source distribution.

The betting function b(v) = 1 + epsilon*(v - 0.5) is a likelihood ratio against
the uniform density, so integrating it gives an estimated alternative CDF on
[0, 1]:  Q(u) = (epsilon/2)*u^2 + (1 - epsilon/2)*u.  Pushing the adapted
quantile through the source pseudo-inverse yields a pseudo value that better
matches the source distribution; with the exact likelihood-ratio bet this
composition is the 1-d Wasserstein-optimal transport map F_s^-1(F_t(z)),
available here directly as ``oracle_transport`` for ground-truth comparisons.
"""

import numpy as np

from ._validation import check_betting_variable, check_unit_interval


def adapt_u(epsilon, u):
    """Adapted quantile Q(u) = (epsilon/2)*u^2 + (1 - epsilon/2)*u.

    Q is a valid CDF on [0, 1] for |epsilon| <= 2: Q(0) = 0, Q(1) = 1, and it
    is monotone (strictly increasing for |epsilon| < 2).  At epsilon = 0 it is
    the identity, the no-harm regime.  Accepts a scalar or an array of u.
    """
    epsilon = check_betting_variable(epsilon)
    if np.ndim(u) == 0:
        u = check_unit_interval(u)
        return 0.5 * epsilon * u * u + (1.0 - 0.5 * epsilon) * u
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)) or u.min() < 0.0 or u.max() > 1.0:
        raise ValueError("u values must be finite and lie in [0, 1]")
    return 0.5 * epsilon * u * u + (1.0 - 0.5 * epsilon) * u


def pseudo_entropy(cdf, u_tilde):
    """Transport an adapted quantile to the source range: F_s^-1(u_tilde)."""
    return cdf.quantile(u_tilde)


def oracle_transport(source_cdf, target_cdf, z):
    """Exact 1-d optimal transport of z from the target to the source: F_s^-1(F_t(z)).

    Both CDFs must be calibrated; accepts a scalar or an array of z.
    """
    if np.ndim(z) == 0:
        return source_cdf.quantile(target_cdf.evaluate(z))
    return source_cdf.inverse_transform(target_cdf.transform(z))
