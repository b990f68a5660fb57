"""
PLY files on the local file system.
"""

from pathlib import Path
from typing import Any

from errors import ConfigError
from scene_io import PlyFormat, PointCloud, load_pointcloud

from .base import SceneSource


class PlySceneSource(SceneSource):
    """Scenes read from PLY files matching a glob pattern under a directory."""

    def __init__(self, config: dict[str, Any]):
        super().__init__(config)
        if "path" not in config:
            raise ConfigError(f"Source {self.name!r} needs a 'path'")
        self.path = Path(config["path"])
        self.pattern = config.get("pattern", "*.ply")
        self.format = PlyFormat(config["format"]) if "format" in config else None

    def files(self) -> list[Path]:
        if not self.path.is_dir():
            raise ConfigError(f"Scene directory not found: {self.path}")
        return sorted(self.path.glob(self.pattern))

    def load(self) -> list[PointCloud]:
        return [load_pointcloud(path, self.format) for path in self.files()]

    def get_info(self) -> dict[str, str]:
        return {
            "type": "ply",
            "path": str(self.path),
            "pattern": self.pattern,
            "exists": str(self.path.is_dir()),
        }
