"""Streaming drift detection on classifier entropies via betting martingales,
with online quantile transport back to the source distribution for
self-training."""

from .betting import AlarmConfig, BettingState, bet, update_wealth, ville_alarm
from .ecdf import EmpiricalCdf
from .engine import EngineConfig, EntropyMatchingEngine, StepRecord
from .losses import MatchConfig, entropy, match_loss, match_pp_loss
from .sfogd import (
    GAMMA_DEFAULT,
    SfogdConfig,
    SfogdState,
    clip_aware_grad,
    clip_aware_loss,
    epsilon_trajectory,
    hindsight_regret,
    oracle_bet,
    sfogd_step,
)
from .streamgen import GeneratedStream, Segment, StreamSpec, generate, make_rng
from .toy_model import (
    GaussianScenario,
    ToyModel,
    evaluate_accuracy,
    grad_match,
    grad_match_pp,
    model_entropy,
    predict_proba,
    risk_curve,
    sgd_step,
)
from .transport import adapt_u, oracle_transport, pseudo_entropy

__version__ = "0.1.0"

__all__ = [
    "AlarmConfig",
    "BettingState",
    "EmpiricalCdf",
    "EngineConfig",
    "EntropyMatchingEngine",
    "GaussianScenario",
    "GeneratedStream",
    "MatchConfig",
    "Segment",
    "SfogdConfig",
    "SfogdState",
    "StepRecord",
    "StreamSpec",
    "ToyModel",
    "adapt_u",
    "bet",
    "clip_aware_grad",
    "clip_aware_loss",
    "entropy",
    "epsilon_trajectory",
    "evaluate_accuracy",
    "generate",
    "grad_match",
    "grad_match_pp",
    "hindsight_regret",
    "make_rng",
    "match_loss",
    "match_pp_loss",
    "model_entropy",
    "oracle_bet",
    "oracle_transport",
    "predict_proba",
    "pseudo_entropy",
    "risk_curve",
    "sgd_step",
    "update_wealth",
    "ville_alarm",
    "GAMMA_DEFAULT",
]
