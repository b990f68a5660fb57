"""
Sparse voxel grids: voxelization and the multi-level hierarchy.
"""

from dataclasses import dataclass

import numpy as np

from errors import EmptyInputError, RangeError, ShapeError
from scene_io import PointCloud


@dataclass(frozen=True, eq=False)
class SparseVoxelGrid:
    """Occupied cells of one resolution level.

    ``coords`` is sorted lexicographically; ``points`` holds one representative
    point per cell in the same order.
    """

    level: int
    voxel_size: float
    coords: np.ndarray
    points: PointCloud
    features: np.ndarray | None = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, 3)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if len(self.points) != coords.shape[0]:
            raise ShapeError("one representative point per cell is required")
        if self.features is not None:
            features = np.asarray(self.features, dtype=np.float64)
            if features.ndim != 2 or features.shape[0] != coords.shape[0]:
                raise ShapeError("features must be (cells, channels)")
            object.__setattr__(self, "features", features)

    def __len__(self) -> int:
        return self.coords.shape[0]

    def index_of(self, coord) -> int:
        """Row of a cell coordinate; raises KeyError when the cell is empty."""
        hits = np.flatnonzero(np.all(self.coords == np.asarray(coord), axis=1))
        if hits.size == 0:
            raise KeyError(tuple(coord))
        return int(hits[0])

    def centers(self) -> np.ndarray:
        return (self.coords + 0.5) * self.voxel_size

    def offsets(self) -> np.ndarray:
        """Representative offset from the cell center in voxel units, in [-0.5, 0.5]."""
        return self.points.positions / self.voxel_size - (self.coords + 0.5)

    def with_features(self, features: np.ndarray) -> "SparseVoxelGrid":
        return SparseVoxelGrid(
            self.level, self.voxel_size, self.coords, self.points, features
        )


def _nearest_per_group(
    group: np.ndarray, distance: np.ndarray
) -> np.ndarray:
    """Index of the smallest distance within each group, ties to the lowest index.

    Groups are consecutive integers 0..G-1; the result has one entry per group.
    """
    order = np.lexsort((np.arange(group.size), distance, group))
    grouped = group[order]
    first = np.ones(group.size, dtype=bool)
    first[1:] = grouped[1:] != grouped[:-1]
    return order[first]


def voxelize(pc: PointCloud, voxel_size: float) -> SparseVoxelGrid:
    """Voxelize a cloud; each cell keeps the point nearest its center.

    Raises:
        EmptyInputError: If the cloud has no points
        RangeError: If voxel_size is not positive
    """
    if voxel_size <= 0:
        raise RangeError("voxel_size must be positive")
    if len(pc) == 0:
        raise EmptyInputError("cannot voxelize an empty point cloud")

    coords = np.floor(pc.positions / voxel_size).astype(np.int64)
    centers = (coords + 0.5) * voxel_size
    distance = np.sum((pc.positions - centers) ** 2, axis=1)

    cell_coords, inverse = np.unique(coords, axis=0, return_inverse=True)
    representatives = _nearest_per_group(inverse.ravel(), distance)
    return SparseVoxelGrid(0, voxel_size, cell_coords, pc.take(representatives))


def coarsen(grid: SparseVoxelGrid) -> SparseVoxelGrid:
    """Next level: doubled voxel size, representative propagated from the child
    whose representative lies nearest the coarse center."""
    voxel_size = grid.voxel_size * 2.0
    parent = np.floor_divide(grid.coords, 2)
    cell_coords, inverse = np.unique(parent, axis=0, return_inverse=True)
    inverse = inverse.ravel()

    centers = (cell_coords[inverse] + 0.5) * voxel_size
    distance = np.sum((grid.points.positions - centers) ** 2, axis=1)
    children = _nearest_per_group(inverse, distance)
    return SparseVoxelGrid(
        grid.level + 1, voxel_size, cell_coords, grid.points.take(children)
    )


def build_hierarchy(grid: SparseVoxelGrid, levels: int) -> list[SparseVoxelGrid]:
    """Return ``levels`` grids starting with ``grid``, each twice as coarse."""
    if levels < 1:
        raise RangeError("levels must be at least 1")
    hierarchy = [grid]
    for _ in range(levels - 1):
        hierarchy.append(coarsen(hierarchy[-1]))
    return hierarchy
