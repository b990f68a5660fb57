"""
Synthetic scene generators used as fixtures and as stand-ins for real datasets.
"""

from collections.abc import Sequence

import numpy as np

from errors import DataError

from .pointcloud import PointCloud

_AXES = {"x": 0, "y": 1, "z": 2}

# 153/255: survives a round trip through byte-encoded PLY colors
DEFAULT_PLANE_COLOR = (0.6, 0.6, 0.6)


def generate_plane_scene(
    extent: float,
    spacing: float,
    axis: str = "z",
    level: float = 0.0,
    color: Sequence[float] = DEFAULT_PLANE_COLOR,
) -> PointCloud:
    """Axis-aligned planar lattice with constant normal and color.

    The lattice holds round(extent / spacing) + 1 points per side; point k sits
    at (k + 1/2) * spacing so that every point falls strictly inside one
    spacing-sized voxel. The points therefore span [spacing / 2,
    extent + spacing / 2] along both in-plane axes, half a spacing past
    ``extent``. The plane lies at ``level`` along ``axis``.

    Raises:
        DataError: Non-positive extent or spacing, or unknown axis
    """
    if extent <= 0 or spacing <= 0:
        raise DataError("extent and spacing must be positive")
    if axis not in _AXES:
        raise DataError(f"axis must be one of x, y, z (got {axis!r})")

    per_side = int(round(extent / spacing)) + 1
    ticks = (np.arange(per_side) + 0.5) * spacing
    u, v = np.meshgrid(ticks, ticks, indexing="ij")

    normal_axis = _AXES[axis]
    in_plane = [a for a in range(3) if a != normal_axis]
    positions = np.empty((per_side * per_side, 3))
    positions[:, in_plane[0]] = u.ravel()
    positions[:, in_plane[1]] = v.ravel()
    positions[:, normal_axis] = level

    normals = np.zeros_like(positions)
    normals[:, normal_axis] = 1.0
    colors = np.broadcast_to(np.asarray(color, dtype=np.float64), positions.shape)
    return PointCloud(positions, colors, normals)


def _bounds(bbox) -> tuple[np.ndarray, np.ndarray]:
    if np.isscalar(bbox):
        return np.zeros(3), np.full(3, float(bbox))
    lo, hi = (np.asarray(corner, dtype=np.float64) for corner in bbox)
    return lo, hi


def generate_noisy_volume_scene(
    count: int,
    bbox,
    color_variance: float,
    normal_noise: float,
    seed: int,
) -> PointCloud:
    """Points uniform in a box with Gaussian color and normal perturbations.

    Colors are 0.5 plus Normal(0, color_variance) per channel, clipped to
    [0, 1]; normals are (0, 0, 1) plus Normal(0, normal_noise**2) per
    component, renormalized.

    Args:
        count: Number of points
        bbox: Cube edge in meters, or a (min corner, max corner) pair
        color_variance: Per-channel color variance
        normal_noise: Standard deviation of the normal perturbation
        seed: Generator seed; equal seeds give identical clouds
    """
    if count <= 0:
        raise DataError("count must be positive")
    lo, hi = _bounds(bbox)
    if np.any(hi <= lo):
        raise DataError("bounding box must have positive extent")

    rng = np.random.default_rng(seed)
    positions = rng.uniform(lo, hi, size=(count, 3))
    colors = np.clip(
        0.5 + rng.normal(0.0, np.sqrt(color_variance), size=(count, 3)), 0.0, 1.0
    )
    normals = np.array([0.0, 0.0, 1.0]) + rng.normal(0.0, normal_noise, (count, 3))
    lengths = np.linalg.norm(normals, axis=1)
    degenerate = lengths < 1e-12
    normals[degenerate] = (0.0, 0.0, 1.0)
    lengths[degenerate] = 1.0
    normals /= lengths[:, None]
    return PointCloud(positions, colors, normals)
