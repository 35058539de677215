"""Scale-free online gradient descent for the betting variable.

The per-step loss is the negative log of the bet, made "clip-aware": when the
current epsilon already exceeds the hindsight bound D in the winning direction,
the loss is flat (zero subgradient), which keeps every iterate inside
[-(D + gamma), D + gamma] provided 0 < gamma < 2 - D.  Step sizes are
normalized by the running root-sum-of-squared gradients, giving an anytime
regret bound of order sqrt(t) against the best fixed epsilon* in [-D, D].
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_finite_scalar, check_unit_interval

GAMMA_DEFAULT = 1.0 / (8.0 * math.sqrt(3.0))
CLIP_D_DEFAULT = 1.8


@dataclass(frozen=True)
class SfogdConfig:
    """Clip bound D on the hindsight-optimal bet and the learning rate gamma.

    The constraint gamma < 2 - D is what keeps the learned epsilon strictly
    inside (-2, 2), i.e. keeps the betting function valid.
    """

    clip_d: float = CLIP_D_DEFAULT
    gamma: float = GAMMA_DEFAULT

    def __post_init__(self):
        if not 0.0 < self.clip_d < 2.0:
            raise ValueError(f"clip_d must lie in (0, 2), got {self.clip_d}")
        if not 0.0 < self.gamma < 2.0 - self.clip_d:
            raise ValueError(
                f"gamma must lie in (0, 2 - clip_d) = (0, {2.0 - self.clip_d}), "
                f"got {self.gamma}"
            )

    @property
    def epsilon_bound(self):
        return self.clip_d + self.gamma


@dataclass(frozen=True, slots=True)
class SfogdState:
    epsilon: float = 0.0
    grad_sq_sum: float = 0.0
    grad_history_len: int = 0


def oracle_bet(u, clip_d=CLIP_D_DEFAULT):
    """Hindsight-optimal clipped bet D*sign(u - 0.5); sign(0) resolves to +1."""
    u = check_unit_interval(u)
    return clip_d if u >= 0.5 else -clip_d


def clip_aware_grad(epsilon, u, clip_d=CLIP_D_DEFAULT):
    """Subgradient of the clip-aware negative-log-bet loss at epsilon.

    Zero on the flat branch (epsilon past D in the winning direction),
    otherwise -(u - 0.5) / (1 + epsilon*(u - 0.5)).
    """
    epsilon = check_finite_scalar(epsilon, "epsilon")
    u = check_unit_interval(u)
    best = oracle_bet(u, clip_d)
    if best * epsilon > 0.0 and abs(epsilon) > clip_d:
        return 0.0
    centered = u - 0.5
    denom = 1.0 + epsilon * centered
    if denom <= 0.0:
        raise ValueError(
            f"non-positive bet {denom} at epsilon={epsilon}, u={u}; "
            "epsilon is outside the valid betting range for this u"
        )
    return -centered / denom


def clip_aware_loss(epsilon, u, clip_d=CLIP_D_DEFAULT):
    """The clip-aware loss itself: -log of the (possibly clipped) bet."""
    epsilon = check_finite_scalar(epsilon, "epsilon")
    u = check_unit_interval(u)
    best = oracle_bet(u, clip_d)
    if best * epsilon > 0.0 and abs(epsilon) > clip_d:
        epsilon = best
    return -math.log(1.0 + epsilon * (u - 0.5))


def sfogd_step(state, u, config):
    """One update: epsilon' = epsilon - gamma * g / sqrt(grad_sq_sum + g^2).

    The normalizer includes the current gradient.  While every gradient seen so
    far is zero the update is skipped (epsilon and the zero accumulator kept),
    which handles the degenerate all-centered prefix without discarding data.
    """
    g = clip_aware_grad(state.epsilon, u, config.clip_d)
    grad_sq_sum = state.grad_sq_sum + g * g
    if grad_sq_sum > 0.0:
        epsilon = state.epsilon - config.gamma * g / math.sqrt(grad_sq_sum)
    else:
        epsilon = state.epsilon
    return SfogdState(
        epsilon=epsilon,
        grad_sq_sum=grad_sq_sum,
        grad_history_len=state.grad_history_len + 1,
    )


def epsilon_trajectory(us, config, initial_epsilon=0.0):
    """Epsilons used at each step of a stream (position j is predictable from us[:j]).

    Fast plain-float loop equivalent to folding :func:`sfogd_step`; also returns
    the gradient observed at each step.
    """
    us = np.asarray(us, dtype=float)
    if us.ndim != 1:
        raise ValueError("us must be one-dimensional")
    clip_d, gamma = config.clip_d, config.gamma
    eps = float(initial_epsilon)
    gss = 0.0
    eps_used = np.empty(us.size)
    grads = np.empty(us.size)
    for j, u in enumerate(us):
        eps_used[j] = eps
        best = clip_d if u >= 0.5 else -clip_d
        if best * eps > 0.0 and abs(eps) > clip_d:
            g = 0.0
        else:
            centered = u - 0.5
            g = -centered / (1.0 + eps * centered)
        grads[j] = g
        gss += g * g
        if gss > 0.0:
            eps -= gamma * g / math.sqrt(gss)
    return eps_used, grads


def hindsight_regret(us, epsilon_trace, config, grid_resolution=10001):
    """Prefix regret of the played epsilons against the best fixed grid point.

    For each prefix t: Reg(t) = sum of clip-aware losses at the played epsilons
    minus the minimum, over a uniform grid of epsilon* in [-D, D], of the same
    loss sum at that fixed epsilon*.  Can go negative on piecewise-stationary
    streams where the adaptive sequence beats every fixed competitor.
    """
    us = np.asarray(us, dtype=float)
    epsilon_trace = np.asarray(epsilon_trace, dtype=float)
    if us.size == 0:
        raise ValueError("us must be non-empty")
    if us.shape != epsilon_trace.shape:
        raise ValueError("us and epsilon_trace must have equal length")
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be at least 2")
    grid = np.linspace(-config.clip_d, config.clip_d, grid_resolution)
    played = np.array(
        [clip_aware_loss(e, u, config.clip_d) for e, u in zip(epsilon_trace, us)]
    )
    cum_played = np.cumsum(played)
    # |grid points| never exceed D, so the flat branch is unreachable on the grid
    cum_grid = np.zeros_like(grid)
    regret = np.empty(us.size)
    for t, u in enumerate(us):
        cum_grid -= np.log1p(grid * (u - 0.5))
        regret[t] = cum_played[t] - cum_grid.min()
    return regret
