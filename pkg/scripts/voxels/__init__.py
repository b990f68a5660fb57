"""
Sparse voxel hierarchy: voxelization, windows and KNN pooling.
"""

from .grid import SparseVoxelGrid, build_hierarchy, coarsen, voxelize
from .pooling import DEFAULT_K, knn_neighbors, knn_pool_downsample, parent_indices
from .windows import Window, WindowPartition, partition_windows, window_coords

__all__ = [
    "DEFAULT_K",
    "SparseVoxelGrid",
    "Window",
    "WindowPartition",
    "build_hierarchy",
    "coarsen",
    "knn_neighbors",
    "knn_pool_downsample",
    "parent_indices",
    "partition_windows",
    "voxelize",
    "window_coords",
]
