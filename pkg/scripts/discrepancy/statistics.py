"""
Per-window sparsity and signal-variance statistics.
"""

import numpy as np
from scipy.spatial.distance import pdist

from errors import MaskError, RangeError, SignalMaskError
from scene_io import PointCloud, Signal
from voxels import partition_windows, voxelize

from .histogram import DEFAULT_BINS, HistogramAccumulator, NormalizedCumulativeHistogram

OCCUPANCY = "occupancy"


def pairwise_variance(values: np.ndarray) -> float:
    """(1 / 2N^2) * sum over ordered pairs of ||s(x) - s(y)||^2.

    pdist lists every unordered pair once, which cancels the 1/2.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    n = values.shape[0]
    if n < 2:
        return 0.0
    return float(pdist(values, "sqeuclidean").sum() / (n * n))


def variance_bound(signal: Signal, voxel_size: float, window_size: int) -> float:
    """Largest pairwise variance the signal can reach inside one window.

    Half the points at each of two opposite corners of the admissible cube
    give 3 * edge^2 / 4: the edge is the window span for positions, 1 for
    colors and 2 for unit normals.
    """
    signal = as_signal(signal)
    if signal is Signal.POSITION:
        span = max(window_size - 1, 1) * voxel_size
        return 3.0 * span * span / 4.0
    if signal is Signal.COLOR:
        return 3.0 / 4.0
    return 3.0


def as_signal(name: Signal | str) -> Signal:
    try:
        return Signal(name)
    except ValueError as e:
        raise RangeError(f"unknown signal {name!r}") from e


def _check(voxel_size: float, window_size: int) -> None:
    if voxel_size <= 0:
        raise RangeError("voxel_size must be positive")
    if window_size < 1:
        raise RangeError("window_size must be at least 1")


def window_occupancy_ratios(
    pc: PointCloud, voxel_size: float, window_size: int
) -> np.ndarray:
    """Occupied-voxel fraction of every nonempty window, in (0, 1].

    Raises:
        EmptyInputError: If the cloud is empty
    """
    _check(voxel_size, window_size)
    grid = voxelize(pc, voxel_size)
    return partition_windows(grid, window_size).occupancy_ratios()


def window_signal_variances(
    pc: PointCloud, voxel_size: float, window_size: int, signal: Signal | str
) -> np.ndarray:
    """Normalized variance of one signal over each nonempty window's
    representative points, clamped to [0, 1].

    Raises:
        SignalMaskError: If the cloud lacks the signal
        EmptyInputError: If the cloud is empty
    """
    _check(voxel_size, window_size)
    signal = as_signal(signal)
    if signal not in pc.signal_mask:
        raise SignalMaskError(f"cloud has no {signal} signal")
    grid = voxelize(pc, voxel_size)
    try:
        values = grid.points.signal(signal)
    except MaskError as e:
        raise SignalMaskError(str(e)) from e

    bound = variance_bound(signal, voxel_size, window_size)
    partition = partition_windows(grid, window_size)
    variances = np.array(
        [pairwise_variance(values[w.members]) for w in partition.windows]
    )
    return np.clip(variances / bound, 0.0, 1.0)


def occupancy_accumulator(
    pc: PointCloud, voxel_size: float, window_size: int, bins: int = DEFAULT_BINS
) -> HistogramAccumulator:
    return HistogramAccumulator(bins).add(
        window_occupancy_ratios(pc, voxel_size, window_size)
    )


def variance_accumulator(
    pc: PointCloud,
    voxel_size: float,
    window_size: int,
    signal: Signal | str,
    bins: int = DEFAULT_BINS,
) -> HistogramAccumulator:
    return HistogramAccumulator(bins).add(
        window_signal_variances(pc, voxel_size, window_size, signal)
    )


def window_occupancy_stats(
    pc: PointCloud, voxel_size: float, window_size: int, bins: int = DEFAULT_BINS
) -> NormalizedCumulativeHistogram:
    """NCH of the window occupancy ratio over every nonempty window."""
    return occupancy_accumulator(pc, voxel_size, window_size, bins).normalized(
        OCCUPANCY, voxel_size, window_size
    )


def signal_variance_stats(
    pc: PointCloud,
    voxel_size: float,
    window_size: int,
    signal: Signal | str,
    bins: int = DEFAULT_BINS,
) -> NormalizedCumulativeHistogram:
    """NCH of the normalized per-window variance of ``signal``."""
    signal = as_signal(signal)
    return variance_accumulator(pc, voxel_size, window_size, signal, bins).normalized(
        signal.value, voxel_size, window_size
    )
