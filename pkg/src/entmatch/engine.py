"""Streaming orchestration: calibrate once, then per test point run
z -> u -> bet -> adapted quantile -> pseudo-entropy -> model update -> epsilon update,
emitting a full step record.

Three modes share the same betting/transport core:

- ``toy-model``: inputs are raw covariates x; the engine tracks a ToyModel,
  computes its entropy, and self-trains it on the pseudo-entropy targets.
- ``monitor-only``: inputs are entropy values from an external model; no
  parameter is updated, records carry no omega.
- ``transport-only``: identical engine behaviour to monitor-only; the CLI layer
  additionally writes the pseudo-entropy targets for external training loops.

The epsilon used for the bet and the transport at step j is the one computed at
step j-1, so the wealth process stays a valid test martingale.  The Ville alarm
is computed on the running wealth supremum and latches, but never gates
adaptation: the engine keeps adapting after an alarm and merely reports it.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_finite_scalar
from .betting import AlarmConfig, BettingState, bet, update_wealth, ville_alarm
from .ecdf import EmpiricalCdf
from .losses import MatchConfig, match_loss, match_pp_loss
from .sfogd import GAMMA_DEFAULT, SfogdConfig, SfogdState, sfogd_step
from .toy_model import ToyModel, grad_match, grad_match_pp, model_entropy
from .transport import adapt_u

MODES = ("toy-model", "monitor-only", "transport-only")
UPDATE_LOSSES = ("match++", "match")
LAMBDA_DEFAULT = 0.4 * math.log(2.0)


@dataclass(frozen=True)
class EngineConfig:
    """Bundled engine configuration, as read from a key-value config file."""

    sfogd: SfogdConfig = field(default_factory=SfogdConfig)
    match: MatchConfig = field(default_factory=MatchConfig)
    eta: float = 5.0
    alpha: float = 0.01
    action_delay: int = 100
    batch_size: int = 1
    mode: str = "monitor-only"

    def __post_init__(self):
        if self.action_delay < 0:
            raise ValueError(f"action_delay must be >= 0, got {self.action_delay}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.eta < 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    @classmethod
    def from_mapping(cls, mapping):
        """Build from config-file keys: D, gamma, eta, alpha, lambda,
        action_delay, batch_size, mode (unknown keys rejected; 'seed' ignored
        here, it belongs to the caller)."""
        mapping = dict(mapping)
        mapping.pop("seed", None)
        sfogd_kwargs, match_kwargs, kwargs = {}, {}, {}
        for key, raw in mapping.items():
            if key == "D":
                sfogd_kwargs["clip_d"] = float(raw)
            elif key == "gamma":
                sfogd_kwargs["gamma"] = float(raw)
            elif key == "lambda":
                match_kwargs["lambda_threshold"] = float(raw)
            elif key in ("eta", "alpha"):
                kwargs[key] = float(raw)
            elif key in ("action_delay", "batch_size"):
                kwargs[key] = int(raw)
            elif key == "mode":
                kwargs[key] = str(raw)
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(sfogd=SfogdConfig(**sfogd_kwargs), match=MatchConfig(**match_kwargs),
                   **kwargs)

    def build_engine(self, **overrides):
        params = dict(
            mode=self.mode,
            clip_d=self.sfogd.clip_d,
            gamma=self.sfogd.gamma,
            eta=self.eta,
            alpha=self.alpha,
            lambda_threshold=self.match.lambda_threshold,
            action_delay=self.action_delay,
            batch_size=self.batch_size,
        )
        params.update(overrides)
        return EntropyMatchingEngine(**params)


def _fmt(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class StepRecord:
    """Full trace of one online step; omega and loss are absent outside toy mode."""

    step: int
    z: float
    u: float
    b: float
    log_wealth: float
    epsilon: float
    u_tilde: float
    z_tilde: float
    alarm: bool
    omega: float | None = None
    loss: float | None = None

    def to_json_line(self):
        """One JSON object per line; floats carry 17 significant digits so a
        trace replays bit-identically."""
        parts = [
            f'"step": {self.step}',
            f'"z": {_fmt(self.z)}',
            f'"u": {_fmt(self.u)}',
            f'"b": {_fmt(self.b)}',
            f'"log_wealth": {_fmt(self.log_wealth)}',
            f'"epsilon": {_fmt(self.epsilon)}',
            f'"u_tilde": {_fmt(self.u_tilde)}',
            f'"z_tilde": {_fmt(self.z_tilde)}',
            f'"alarm": {"true" if self.alarm else "false"}',
        ]
        if self.omega is not None:
            parts.append(f'"omega": {_fmt(self.omega)}')
        if self.loss is not None:
            parts.append(f'"loss": {_fmt(self.loss)}')
        return "{" + ", ".join(parts) + "}"


class EntropyMatchingEngine(BaseEstimator):
    """Drift monitor plus optional online self-training over a scalar stream.

    ``fit`` calibrates the source-entropy CDF and initializes the betting and
    learning state (epsilon = 0, wealth = 1, omega = 0); ``step``/``run``
    consume the test stream.  One engine owns one stream: run independent
    instances for parallel streams.

    Parameters
    ----------
    mode : {"toy-model", "monitor-only", "transport-only"}
        Input interpretation; see the module docstring.
    clip_d, gamma : float
        SF-OGD clip bound and learning rate (gamma < 2 - clip_d).
    eta : float
        Model learning rate (toy mode only).  The reference toy configuration
        is eta=5 with batch_size=64; scale eta with the batch size.
    alpha : float
        Ville alarm level; the wealth threshold is 1/alpha.
    lambda_threshold : float
        Entropy filter threshold of the filtered match loss, in nats.
    action_delay : int
        Steps before model updates begin; monitoring runs from step one.
    batch_size : int
        Samples accumulated per model update in toy mode.
    update_loss : {"match++", "match"}
        Gradient used for self-training: filtered/weighted, or plain quadratic.
    target_map : callable or None
        Optional override mapping an entropy z to the self-training target.
        Default (None) uses the betting transport's pseudo-entropy.  The
        betting transport is always computed and recorded either way.
    """

    def __init__(self, mode="monitor-only", clip_d=1.8, gamma=GAMMA_DEFAULT,
                 eta=5.0, alpha=0.01, lambda_threshold=LAMBDA_DEFAULT,
                 action_delay=100, batch_size=1, update_loss="match++",
                 target_map=None):
        self.mode = mode
        self.clip_d = clip_d
        self.gamma = gamma
        self.eta = eta
        self.alpha = alpha
        self.lambda_threshold = lambda_threshold
        self.action_delay = action_delay
        self.batch_size = batch_size
        self.update_loss = update_loss
        self.target_map = target_map

    def fit(self, source_entropies, y=None):
        """Calibrate on holdout source entropies and reset all online state."""
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.update_loss not in UPDATE_LOSSES:
            raise ValueError(
                f"update_loss must be one of {UPDATE_LOSSES}, got {self.update_loss!r}"
            )
        if int(self.action_delay) < 0:
            raise ValueError(f"action_delay must be >= 0, got {self.action_delay}")
        if int(self.batch_size) < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.eta < 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        self._sfogd_config = SfogdConfig(clip_d=self.clip_d, gamma=self.gamma)
        self._match_config = MatchConfig(lambda_threshold=self.lambda_threshold)
        self._alarm_config = AlarmConfig(alpha=self.alpha)
        self.cdf_ = EmpiricalCdf().fit(source_entropies)
        n = self.cdf_.n_samples_
        # keeps the bet strictly positive even at |epsilon| -> 2
        self._u_low = 1.0 / (n + 1.0)
        self._u_high = n / (n + 1.0)
        return self.reset()

    calibrate = fit

    def reset(self):
        """Return to the just-calibrated state; the CDF stays frozen."""
        self._check_fitted()
        self.betting_state_ = BettingState()
        self.sfogd_state_ = SfogdState()
        self.model_ = ToyModel(0.0)
        self.alarm_step_ = None
        self._batch = []
        return self

    def _check_fitted(self):
        if not hasattr(self, "cdf_"):
            raise NotFittedError("engine must be calibrated with fit() before use")

    @property
    def is_toy_mode(self):
        return self.mode == "toy-model"

    def step(self, value):
        """Process one stream element (x in toy mode, an entropy z otherwise)."""
        self._check_fitted()
        value = check_finite_scalar(value, "stream value")
        j = self.betting_state_.step + 1

        if self.is_toy_mode:
            x = value
            z = model_entropy(self.model_, x)
        else:
            z = value

        u = self.cdf_.evaluate(z)
        u_clamped = min(max(u, self._u_low), self._u_high)

        epsilon = self.sfogd_state_.epsilon
        b = bet(epsilon, u_clamped)
        betting = update_wealth(self.betting_state_, u_clamped)

        u_tilde = adapt_u(epsilon, u)
        z_tilde = self.cdf_.quantile(u_tilde)

        alarm = ville_alarm(betting, self._alarm_config)
        if alarm and self.alarm_step_ is None:
            self.alarm_step_ = j

        omega = None
        loss = None
        if self.is_toy_mode:
            target = z_tilde if self.target_map is None else float(self.target_map(z))
            if self.update_loss == "match++":
                loss = match_pp_loss(z, target, self._match_config)
            else:
                loss = match_loss(z, target)
            if j > self.action_delay:
                self._batch.append((x, target))
                if len(self._batch) == self.batch_size:
                    self._apply_model_update()
            omega = self.model_.omega

        self.sfogd_state_ = sfogd_step(self.sfogd_state_, u_clamped, self._sfogd_config)
        self.betting_state_ = replace(betting, epsilon=self.sfogd_state_.epsilon)

        return StepRecord(
            step=j, z=z, u=u, b=b, log_wealth=betting.log_wealth, epsilon=epsilon,
            u_tilde=u_tilde, z_tilde=z_tilde, alarm=alarm, omega=omega, loss=loss,
        )

    def _apply_model_update(self):
        if self.update_loss == "match++":
            grads = [grad_match_pp(self.model_, x, zt, self._match_config)
                     for x, zt in self._batch]
        else:
            grads = [grad_match(self.model_, x, zt) for x, zt in self._batch]
        mean_grad = sum(grads) / len(grads)
        self.model_ = ToyModel(self.model_.omega - self.eta * mean_grad)
        self._batch = []

    def run(self, stream):
        """Fold :meth:`step` over a stream; deterministic given the stream."""
        return [self.step(value) for value in stream]

    def transform(self, stream):
        """Pseudo-entropy targets for a stream, starting from a fresh state."""
        self.reset()
        return np.array([record.z_tilde for record in self.run(stream)])


def write_records(records, fh):
    """Serialize records as JSON lines to an open text file."""
    for record in records:
        fh.write(record.to_json_line())
        fh.write("\n")
