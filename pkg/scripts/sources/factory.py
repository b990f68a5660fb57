"""
Factory for creating scene source instances.
"""

from typing import Any

from errors import ConfigError

from .base import SceneSource
from .local import PlySceneSource
from .synthetic import NoisyVolumeSceneSource, PlaneSceneSource

SOURCE_TYPES = {
    "ply": PlySceneSource,
    "plane": PlaneSceneSource,
    "noisy-volume": NoisyVolumeSceneSource,
}


def create_source(config: dict[str, Any]) -> SceneSource:
    """Create a scene source instance based on configuration.

    Args:
        config: Source configuration dictionary

    Returns:
        SceneSource instance

    Raises:
        ConfigError: If the source type is not supported or the name is missing
    """
    source_type = config.get("type")
    if source_type not in SOURCE_TYPES:
        raise ConfigError(f"Unsupported source type: {source_type}")
    if "name" not in config:
        raise ConfigError(f"{source_type} source without a name")
    return SOURCE_TYPES[source_type](config)
