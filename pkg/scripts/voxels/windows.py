"""
Regular and shifted window partitions of a sparse grid.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from errors import RangeError

from .grid import SparseVoxelGrid


class Window(NamedTuple):
    coord: tuple[int, int, int]
    members: np.ndarray


@dataclass(frozen=True)
class WindowPartition:
    window_size: int
    shifted: bool
    windows: list[Window]

    @property
    def offset(self) -> int:
        return self.window_size // 2 if self.shifted else 0

    def __len__(self) -> int:
        return len(self.windows)

    def occupancy_ratios(self) -> np.ndarray:
        volume = float(self.window_size) ** 3
        return np.array([len(w.members) / volume for w in self.windows])


def window_coords(coords: np.ndarray, window_size: int, shifted: bool) -> np.ndarray:
    """floor((coord + offset) / window_size) per axis."""
    offset = window_size // 2 if shifted else 0
    return np.floor_divide(np.asarray(coords, dtype=np.int64) + offset, window_size)


def partition_windows(
    grid: SparseVoxelGrid, window_size: int, shifted: bool = False
) -> WindowPartition:
    """Group occupied cells into non-overlapping cubic windows.

    Windows are ordered lexicographically by window coordinate and members by
    cell index; empty windows are not listed.
    """
    if window_size < 1:
        raise RangeError("window_size must be at least 1")
    keys = window_coords(grid.coords, window_size, shifted)
    unique, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()

    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(unique.shape[0] + 1))
    windows = [
        Window(tuple(int(c) for c in unique[w]), order[bounds[w] : bounds[w + 1]])
        for w in range(unique.shape[0])
    ]
    return WindowPartition(window_size, shifted, windows)
