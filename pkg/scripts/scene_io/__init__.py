"""
Point cloud ingestion, synthetic scenes and PLY serialization.
"""

from .ply import PlyFormat, load_pointcloud, save_pointcloud
from .pointcloud import (
    FULL_MASK,
    SIGNAL_ORDER,
    PointCloud,
    Signal,
    mask_code,
    parse_mask,
)
from .synthetic import generate_noisy_volume_scene, generate_plane_scene

__all__ = [
    "FULL_MASK",
    "SIGNAL_ORDER",
    "PlyFormat",
    "PointCloud",
    "Signal",
    "generate_noisy_volume_scene",
    "generate_plane_scene",
    "load_pointcloud",
    "mask_code",
    "parse_mask",
    "save_pointcloud",
]
