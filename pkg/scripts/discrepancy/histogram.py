"""
Normalized cumulative histograms over [0, 1].
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from errors import EmptyInputError, RangeError, ShapeError

DEFAULT_BINS = 50


def bin_edges(bins: int) -> np.ndarray:
    return np.arange(bins + 1, dtype=np.float64) / bins


def bin_indices(values: np.ndarray, bins: int) -> np.ndarray:
    """Bin k holds [k/bins, (k+1)/bins); 1.0 lands in the last bin."""
    values = np.asarray(values, dtype=np.float64).ravel()
    return np.clip(np.floor(values * bins).astype(np.int64), 0, bins - 1)


@dataclass(frozen=True, eq=False)
class NormalizedCumulativeHistogram:
    """Fraction of values at or below each bin, plus the statistic it summarizes.

    ``cumulative[k]`` covers every value below ``bin_edges[k + 1]``; the last
    entry is 1.
    """

    signal: str
    voxel_size: float
    window_size: int
    bin_edges: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        cumulative = np.asarray(self.cumulative, dtype=np.float64)
        if edges.ndim != 1 or cumulative.shape != (edges.size - 1,):
            raise ShapeError("cumulative needs one entry per bin")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "cumulative", cumulative)

    @property
    def bins(self) -> int:
        return self.cumulative.size

    def mass(self) -> np.ndarray:
        """Per-bin fraction, the discrete derivative of the cumulative curve."""
        return np.diff(self.cumulative, prepend=0.0)

    def value_at(self, x: float) -> float:
        """Cumulative fraction of the bin containing ``x``."""
        return float(self.cumulative[bin_indices(np.array([x]), self.bins)[0]])

    def as_dict(self) -> dict:
        return {
            "signal": self.signal,
            "voxel_size": float(self.voxel_size),
            "window_size": int(self.window_size),
            "bin_edges": [float(e) for e in self.bin_edges],
            "cumulative": [float(c) for c in self.cumulative],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizedCumulativeHistogram":
        return cls(
            str(data["signal"]),
            float(data["voxel_size"]),
            int(data["window_size"]),
            np.asarray(data["bin_edges"], dtype=np.float64),
            np.asarray(data["cumulative"], dtype=np.float64),
        )


class HistogramAccumulator:
    """Integer bin counts; merging two accumulators adds counts bin-wise."""

    def __init__(self, bins: int = DEFAULT_BINS):
        if bins < 1:
            raise RangeError("bins must be at least 1")
        self.bins = bins
        self.counts = np.zeros(bins, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def add(self, values) -> "HistogramAccumulator":
        values = np.asarray(values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(values)):
            raise RangeError("histogram values must be finite")
        self.counts += np.bincount(bin_indices(values, self.bins), minlength=self.bins)
        return self

    def merge(self, other: "HistogramAccumulator") -> "HistogramAccumulator":
        if other.bins != self.bins:
            raise ShapeError(f"cannot merge {other.bins} bins into {self.bins}")
        merged = HistogramAccumulator(self.bins)
        merged.counts = self.counts + other.counts
        return merged

    __add__ = merge

    def normalized(
        self, signal: str, voxel_size: float, window_size: int
    ) -> NormalizedCumulativeHistogram:
        """Raises EmptyInputError when nothing was added."""
        total = self.total
        if total == 0:
            raise EmptyInputError("histogram holds no values")
        cumulative = np.cumsum(self.counts) / total
        cumulative[-1] = 1.0
        return NormalizedCumulativeHistogram(
            signal, voxel_size, window_size, bin_edges(self.bins), cumulative
        )


def merge_accumulators(
    accumulators: Iterable[HistogramAccumulator],
) -> HistogramAccumulator:
    merged = None
    for accumulator in accumulators:
        merged = accumulator if merged is None else merged.merge(accumulator)
    if merged is None:
        raise EmptyInputError("no histograms to merge")
    return merged


def average_histograms(
    histograms: Sequence[NormalizedCumulativeHistogram],
) -> NormalizedCumulativeHistogram:
    """Bin-wise mean of per-scene curves, every scene weighted equally.

    Raises:
        EmptyInputError: If the list is empty
        ShapeError: If the histograms do not share bins and statistic
    """
    if not histograms:
        raise EmptyInputError("no histograms to average")
    first = histograms[0]
    for other in histograms[1:]:
        if not np.array_equal(other.bin_edges, first.bin_edges):
            raise ShapeError("histograms use different bins")
        if other.signal != first.signal:
            raise ShapeError(f"cannot average {other.signal!r} with {first.signal!r}")
    cumulative = np.mean([h.cumulative for h in histograms], axis=0)
    cumulative[-1] = 1.0
    return NormalizedCumulativeHistogram(
        first.signal, first.voxel_size, first.window_size, first.bin_edges, cumulative
    )
