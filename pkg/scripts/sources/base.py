"""
Abstract base class for scene sources.
"""

from abc import ABC, abstractmethod
from typing import Any

from scene_io import PointCloud


class SceneSource(ABC):
    """Abstract base class for scene sources."""

    def __init__(self, config: dict[str, Any]):
        self.name = config["name"]
        self.config = config

    @abstractmethod
    def load(self) -> list[PointCloud]:
        """Load every scene of this source.

        Returns:
            List of point clouds, in a deterministic order

        Raises:
            ToolkitError: If a scene cannot be produced
        """

    @abstractmethod
    def get_info(self) -> dict[str, str]:
        """Get information about this source.

        Returns:
            Dictionary with source information (type, location, parameters)
        """
