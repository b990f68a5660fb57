"""
KNN max-pooling from a fine grid onto the next coarser grid.
"""

import numpy as np

from errors import InternalError, RangeError, ShapeError

from .grid import SparseVoxelGrid

DEFAULT_K = 16


def parent_indices(fine: SparseVoxelGrid, coarse: SparseVoxelGrid) -> np.ndarray:
    """Index of the coarse cell containing each fine cell, -1 where ``coarse``
    has no such cell."""
    parent = np.floor_divide(fine.coords, 2)
    keys = np.concatenate([coarse.coords, parent])
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    lookup = np.full(inverse.max(initial=-1) + 1, -1, dtype=np.int64)
    lookup[inverse[: len(coarse)]] = np.arange(len(coarse))
    return lookup[inverse[len(coarse) :]]


def knn_neighbors(
    fine: SparseVoxelGrid, coarse: SparseVoxelGrid, k: int
) -> np.ndarray:
    """Fine cells pooled into each coarse cell.

    Candidates are the children of the coarse cell; the k whose
    representatives lie nearest the coarse representative are kept, ties to
    the lower fine index. Rows are padded with the nearest child, so the array
    is (coarse cells, min(k, most children)) and a max over a row is unchanged.

    Raises:
        RangeError: If k < 1
        InternalError: If a coarse cell has no children in ``fine``
    """
    if k < 1:
        raise RangeError("k must be at least 1")
    if len(coarse) == 0:
        return np.zeros((0, 0), dtype=np.int64)

    parent = parent_indices(fine, coarse)
    candidates = np.flatnonzero(parent >= 0)
    owner = parent[candidates]
    children = np.bincount(owner, minlength=len(coarse))
    if np.any(children == 0):
        raise InternalError("coarse cell has no fine candidates")

    offset = fine.points.positions[candidates] - coarse.points.positions[owner]
    distance = np.einsum("ij,ij->i", offset, offset)
    order = np.lexsort((candidates, distance, owner))
    candidates, owner = candidates[order], owner[order]

    starts = np.concatenate([[0], np.cumsum(children)[:-1]])
    rank = np.arange(candidates.size) - starts[owner]
    width = min(k, int(children.max()))
    neighbors = np.repeat(candidates[starts][:, None], width, axis=1)
    keep = rank < width
    neighbors[owner[keep], rank[keep]] = candidates[keep]
    return neighbors


def knn_pool_downsample(
    fine_features: np.ndarray,
    fine: SparseVoxelGrid,
    coarse: SparseVoxelGrid,
    k: int = DEFAULT_K,
) -> np.ndarray:
    """Componentwise max over the k nearest child features of every coarse cell.

    ``fine_features`` are expected to be already normalized and projected.
    """
    fine_features = np.asarray(fine_features, dtype=np.float64)
    if fine_features.ndim != 2 or fine_features.shape[0] != len(fine):
        raise ShapeError("fine features must be (fine cells, channels)")
    neighbors = knn_neighbors(fine, coarse, k)
    return fine_features[neighbors].max(axis=1)
