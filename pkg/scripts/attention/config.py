"""
Parameter containers for windowed self-attention.
"""

from dataclasses import dataclass, replace

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from crse import CrseMode, QuantizedDelta, QuantizerSpec, quantize_delta
from errors import DomainError, EmptyWindowError, ShapeError

PARAMETER_INIT_STD = 0.02


class AttentionConfig(BaseModel):
    """Shape and mode of one attention block."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(gt=0)
    heads: int = Field(gt=0)
    window_size: int = Field(gt=0)
    prompt_count: int = Field(default=5, ge=0)
    crse_mode: CrseMode = CrseMode.VM_DOMAIN_MODULATED
    block_size: int = Field(default=32, gt=0)

    @model_validator(mode="after")
    def _heads_divide_channels(self):
        if self.d % self.heads:
            raise ValueError(f"d={self.d} is not divisible by heads={self.heads}")
        return self

    @property
    def head_dim(self) -> int:
        return self.d // self.heads

    @property
    def scale(self) -> float:
        # full channel dimension, not the per-head width
        return 1.0 / np.sqrt(self.d)


@dataclass(frozen=True, eq=False)
class ProjectionSet:
    q: np.ndarray
    k: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(self.q), np.shape(self.k), np.shape(self.v)}
        if len(shapes) != 1 or len(next(iter(shapes))) != 2:
            raise ShapeError("projections must be three d x d matrices")
        for name in ("q", "k", "v"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ShapeError(f"projection {name} has non-finite entries")

    @classmethod
    def initialize(cls, d: int, rng: np.random.Generator) -> "ProjectionSet":
        return cls(
            *(rng.normal(0.0, PARAMETER_INIT_STD, size=(d, d)) for _ in range(3))
        )

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {"q": self.q, "k": self.k, "v": self.v}


@dataclass(frozen=True, eq=False)
class PromptBank:
    """Virtual key/value voxels, shape (domains, B, d)."""

    features: np.ndarray

    @property
    def domains(self) -> int:
        return self.features.shape[0]

    @property
    def prompt_count(self) -> int:
        return self.features.shape[1]

    @classmethod
    def initialize(
        cls, domains: int, prompt_count: int, d: int, rng: np.random.Generator
    ) -> "PromptBank":
        return cls(rng.normal(0.0, PARAMETER_INIT_STD, size=(domains, prompt_count, d)))

    def for_domain(self, domain: int) -> np.ndarray:
        if not 0 <= int(domain) < self.domains:
            raise DomainError(
                f"domain {domain} outside registered range [0, {self.domains})"
            )
        return self.features[int(domain)]


@dataclass(frozen=True, eq=False)
class AttentionWindow:
    """Features and representative signals of the voxels in one window.

    Deltas are quantized on demand, a tile at a time.
    """

    features: np.ndarray
    signals: np.ndarray
    quantizer: QuantizerSpec

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        signals = np.asarray(self.signals, dtype=np.float64)
        if features.ndim != 2:
            raise ShapeError("window features must be (voxels, channels)")
        if features.shape[0] == 0:
            raise EmptyWindowError("window has no voxels")
        if signals.shape != (features.shape[0], self.quantizer.signal_count):
            raise ShapeError(
                f"signals {signals.shape} do not match {features.shape[0]} voxels "
                f"with {self.quantizer.signal_count} components"
            )
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "signals", signals)

    def __len__(self) -> int:
        return self.features.shape[0]

    def delta_tile(self, rows, cols) -> QuantizedDelta:
        """Quantized s_i - s_j for i in rows, j in cols."""
        delta = self.signals[rows][:, None, :] - self.signals[cols][None, :, :]
        return quantize_delta(delta, self.quantizer)

    def deltas(self) -> QuantizedDelta:
        everything = np.arange(len(self))
        return self.delta_tile(everything, everything)

    def with_features(self, features: np.ndarray) -> "AttentionWindow":
        return replace(self, features=features)
