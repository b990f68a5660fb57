"""
Quantization of per-pair signal differences into look-up table bins.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from errors import ConfigError

COLOR_DELTA_BOUND = 1.0
NORMAL_DELTA_BOUND = 2.0


@dataclass(frozen=True, eq=False)
class QuantizerSpec:
    """Per-component delta bounds plus the 1D and 2D division counts."""

    lower: np.ndarray
    upper: np.ndarray
    divisions_1d: int = 16
    divisions_2d: int = 4

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64).ravel()
        upper = np.asarray(self.upper, dtype=np.float64).ravel()
        if lower.shape != upper.shape:
            raise ConfigError("lower and upper bounds differ in length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ConfigError("quantizer bounds must be finite")
        if np.any(lower >= upper):
            raise ConfigError("every lower bound must be below its upper bound")
        if self.divisions_1d < 2 or self.divisions_2d < 2:
            raise ConfigError("division counts must be at least 2")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def signal_count(self) -> int:
        return self.lower.size

    @classmethod
    def for_window(
        cls,
        window_size: int,
        voxel_size: float,
        signal_count: int = 9,
        divisions_1d: int = 16,
        divisions_2d: int = 4,
    ) -> "QuantizerSpec":
        """Tight bounds of in-window differences.

        Positions: +-(window_size - 1) voxels (at least one voxel), colors +-1,
        normal components +-2. Components follow the position, color, normal
        order in groups of three.
        """
        position = max(window_size - 1, 1) * voxel_size
        bounds = [position, COLOR_DELTA_BOUND, NORMAL_DELTA_BOUND]
        upper = np.repeat(bounds, 3)[:signal_count]
        if upper.size < signal_count:
            raise ConfigError("at most 9 signal components are supported")
        return cls(-upper, upper, divisions_1d, divisions_2d)


class QuantizedDelta(NamedTuple):
    """Bins of the same deltas for 1D (q1) and 2D (q2) tables, shape (..., M)."""

    q1: np.ndarray
    q2: np.ndarray

    @classmethod
    def from_bins(cls, q1, q2=None) -> "QuantizedDelta":
        q1 = np.asarray(q1, dtype=np.int64)
        q2 = q1 if q2 is None else np.asarray(q2, dtype=np.int64)
        return cls(q1, q2)

    @property
    def signal_count(self) -> int:
        return self.q1.shape[-1]

    def reshape(self, *shape) -> "QuantizedDelta":
        m = self.signal_count
        return QuantizedDelta(self.q1.reshape(*shape, m), self.q2.reshape(*shape, m))

    def __getitem__(self, index) -> "QuantizedDelta":
        return QuantizedDelta(self.q1[index], self.q2[index])


def quantize(delta, spec: QuantizerSpec, divisions: int | None = None) -> np.ndarray:
    """bin = clamp(floor((delta - lo) / (hi - lo) * T), 0, T - 1) per component.

    ``delta`` may carry leading batch dimensions; out-of-range values clamp.
    """
    divisions = spec.divisions_1d if divisions is None else divisions
    delta = np.asarray(delta, dtype=np.float64)
    scaled = (delta - spec.lower) / (spec.upper - spec.lower) * divisions
    return np.clip(np.floor(scaled), 0, divisions - 1).astype(np.int64)


def quantize_2d(delta, spec: QuantizerSpec) -> np.ndarray:
    return quantize(delta, spec, spec.divisions_2d)


def quantize_delta(delta, spec: QuantizerSpec) -> QuantizedDelta:
    return QuantizedDelta(quantize(delta, spec), quantize_2d(delta, spec))


def bin_centers(spec: QuantizerSpec, divisions: int | None = None) -> np.ndarray:
    """(M, T) array of the value at the middle of every bin."""
    divisions = spec.divisions_1d if divisions is None else divisions
    fraction = (np.arange(divisions) + 0.5) / divisions
    return spec.lower[:, None] + fraction[None, :] * (spec.upper - spec.lower)[:, None]
