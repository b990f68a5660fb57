"""
Shared fixtures: seeded generators, small clouds and a tiny encoder config.
"""

import numpy as np
import pytest

from encoder import DomainSpec, ModelConfig
from scene_io import generate_noisy_volume_scene, generate_plane_scene, save_pointcloud


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def plane_cloud():
    """0.98 m plane lattice at 0.02 m spacing: 50 x 50 points, one per voxel."""
    return generate_plane_scene(0.98, 0.02)


@pytest.fixture
def noisy_cloud():
    return generate_noisy_volume_scene(500, 1.0, 0.01, 0.1, seed=5)


@pytest.fixture
def tiny_config():
    return ModelConfig(
        voxel_size=0.05,
        levels=5,
        layer_counts=[1, 1, 1, 1, 1],
        window_sizes=[3, 3, 3, 3, 3],
        channels=[8, 8, 16, 16, 16],
        heads=[2, 2, 2, 2, 2],
        prompt_count=2,
        divisions_1d=4,
        divisions_2d=2,
        knn_k=4,
        domains=[
            DomainSpec(name="volume", signals="pcn"),
            DomainSpec(name="volume_p", signals="p"),
        ],
    )


@pytest.fixture
def plane_dir(tmp_path, plane_cloud):
    directory = tmp_path / "plane"
    directory.mkdir()
    save_pointcloud(plane_cloud, directory / "plane_0.ply")
    return directory
