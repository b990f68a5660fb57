"""
Synthetic scene sources.
"""

from typing import Any

import numpy as np

from errors import ConfigError
from scene_io import PointCloud, generate_noisy_volume_scene, generate_plane_scene

from .base import SceneSource


def _scene_seeds(seed: int, scenes: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(scenes)
    return [int(child.generate_state(1)[0]) for child in children]


class PlaneSceneSource(SceneSource):
    """Planar lattices; with a seed, each scene sits at a random level."""

    def __init__(self, config: dict[str, Any]):
        super().__init__(config)
        try:
            self.extent = float(config["extent"])
            self.spacing = float(config["spacing"])
        except KeyError as e:
            raise ConfigError(f"Plane source {self.name!r} needs {e.args[0]!r}") from e
        self.axis = config.get("axis", "z")
        self.level = float(config.get("level", 0.0))
        self.scenes = int(config.get("scenes", 1))
        self.seed = config.get("seed")

    def load(self) -> list[PointCloud]:
        if self.seed is None:
            levels = [self.level] * self.scenes
        else:
            rng = np.random.default_rng(int(self.seed))
            levels = list(self.level + rng.uniform(0.0, self.extent, self.scenes))
        return [
            generate_plane_scene(self.extent, self.spacing, self.axis, level)
            for level in levels
        ]

    def get_info(self) -> dict[str, str]:
        return {
            "type": "plane",
            "extent": str(self.extent),
            "spacing": str(self.spacing),
            "axis": self.axis,
            "scenes": str(self.scenes),
        }


class NoisyVolumeSceneSource(SceneSource):
    """Uniform point volumes with Gaussian color and normal noise."""

    def __init__(self, config: dict[str, Any]):
        super().__init__(config)
        try:
            self.count = int(config["count"])
            self.seed = int(config["seed"])
        except KeyError as e:
            raise ConfigError(
                f"Noisy-volume source {self.name!r} needs {e.args[0]!r}"
            ) from e
        self.bbox = config.get("bbox", 1.0)
        self.color_variance = float(config.get("color_variance", 0.01))
        self.normal_noise = float(config.get("normal_noise", 0.1))
        self.scenes = int(config.get("scenes", 1))

    def load(self) -> list[PointCloud]:
        return [
            generate_noisy_volume_scene(
                self.count, self.bbox, self.color_variance, self.normal_noise, seed
            )
            for seed in _scene_seeds(self.seed, self.scenes)
        ]

    def get_info(self) -> dict[str, str]:
        return {
            "type": "noisy-volume",
            "count": str(self.count),
            "bbox": str(self.bbox),
            "color_variance": str(self.color_variance),
            "normal_noise": str(self.normal_noise),
            "scenes": str(self.scenes),
            "seed": str(self.seed),
        }
