"""Test martingale against the uniform null: bets, log-wealth, and alarms.

Each observation u in [0, 1] multiplies the wealth by b(u) = 1 + epsilon*(u - 0.5).
Under the null (u uniform i.i.d.) the wealth process is a non-negative martingale
with initial value 1, so by Ville's inequality it exceeds 1/alpha with probability
at most alpha.  Wealth is tracked in log space: on strongly shifted streams it can
reach scales like 1e200, far beyond float range.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ._validation import check_betting_variable, check_unit_interval


@dataclass(frozen=True, slots=True)
class BettingState:
    """Mutable core of one martingale stream, carried as an immutable record.

    ``max_log_wealth`` tracks the running supremum, which is what the
    anytime-valid alarm rule thresholds.
    """

    epsilon: float = 0.0
    log_wealth: float = 0.0
    step: int = 0
    max_log_wealth: float = 0.0


@dataclass(frozen=True)
class AlarmConfig:
    """Significance level for the Ville alarm; the wealth threshold is 1/alpha."""

    alpha: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def log_threshold(self):
        return -math.log(self.alpha)


def bet(epsilon, u):
    """Betting function b(u) = 1 + epsilon*(u - 0.5), in [0, 2] for |epsilon| <= 2."""
    epsilon = check_betting_variable(epsilon)
    u = check_unit_interval(u)
    return 1.0 + epsilon * (u - 0.5)


def update_wealth(state, u):
    """Multiply wealth by the bet at the state's epsilon; epsilon itself is unchanged."""
    b = bet(state.epsilon, u)
    if b <= 0.0:
        raise ValueError(
            f"bet collapsed to {b} (epsilon={state.epsilon}, u={u}); "
            "clamp u away from the endpoints before betting at |epsilon| = 2"
        )
    log_wealth = state.log_wealth + math.log(b)
    return replace(
        state,
        log_wealth=log_wealth,
        step=state.step + 1,
        max_log_wealth=max(state.max_log_wealth, log_wealth),
    )


def ville_alarm(state, config):
    """True iff the running wealth supremum ever reached 1/alpha (latched)."""
    return state.max_log_wealth >= config.log_threshold


def log_wealth_trace(us, epsilons):
    """Cumulative log-wealth over a stream, given the epsilon used at each step.

    Vectorized companion to :func:`update_wealth` for whole-stream analysis;
    ``epsilons[j]`` must be predictable (a function of us[:j] only).
    """
    us = np.asarray(us, dtype=float)
    epsilons = np.asarray(epsilons, dtype=float)
    if us.shape != epsilons.shape:
        raise ValueError("us and epsilons must have equal length")
    return np.cumsum(np.log1p(epsilons * (us - 0.5)))
