"""Deterministic synthetic streams: uniform/Beta quantile segments, Gaussian toy
covariates, and direct entropy values, organized as concatenated segments.

Every segment draws from its own counter-based generator keyed by
(seed, segment index), so a segment's content never depends on how much
randomness earlier segments consumed and parallel shards reproduce exactly.
Labels, when present, travel in a sidecar array the engine never sees.
"""

from dataclasses import dataclass

import numpy as np

from .toy_model import ToyModel, model_entropy

KINDS = ("uniform-null", "gaussian-toy", "entropy-direct")


def make_rng(*key):
    """Counter-based generator keyed by a tuple of integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


@dataclass(frozen=True)
class Segment:
    """One contiguous block of a stream.

    ``shift`` applies to gaussian-toy and entropy-direct segments;
    ``beta_a``/``beta_b`` shape uniform-null segments (1, 1 = uniform).
    """

    length: int
    shift: float = 0.0
    beta_a: float = 1.0
    beta_b: float = 1.0

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"segment length must be >= 1, got {self.length}")
        if self.beta_a <= 0.0 or self.beta_b <= 0.0:
            raise ValueError("beta parameters must be positive")


@dataclass(frozen=True)
class StreamSpec:
    kind: str
    segments: tuple
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.segments:
            raise ValueError("spec needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_length(self):
        return sum(segment.length for segment in self.segments)


@dataclass(frozen=True)
class GeneratedStream:
    """Stream values plus an optional label sidecar (gaussian kinds only)."""

    values: np.ndarray
    labels: np.ndarray | None = None


def _gaussian_segment(segment, rng):
    y = rng.integers(0, 2, segment.length) * 2.0 - 1.0
    x = rng.normal(0.0, 1.0, segment.length) + y + segment.shift
    return x, y


def generate(spec):
    """Materialize a stream; identical specs yield identical output."""
    values, labels = [], []
    for index, segment in enumerate(spec.segments):
        rng = make_rng(spec.seed, index)
        if spec.kind == "uniform-null":
            if segment.beta_a == 1.0 and segment.beta_b == 1.0:
                values.append(rng.random(segment.length))
            else:
                values.append(rng.beta(segment.beta_a, segment.beta_b, segment.length))
        elif spec.kind == "gaussian-toy":
            x, y = _gaussian_segment(segment, rng)
            values.append(x)
            labels.append(y)
        else:  # entropy-direct: entropies of the unadapted model on shifted data
            x, y = _gaussian_segment(segment, rng)
            values.append(model_entropy(ToyModel(0.0), x))
            labels.append(y)
    return GeneratedStream(
        values=np.concatenate(values),
        labels=np.concatenate(labels) if labels else None,
    )
