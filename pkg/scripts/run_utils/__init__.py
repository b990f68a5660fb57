"""
Shared plumbing for the command-line tools.
"""

from .config import RunConfig, load_model_config, load_scene_sources, load_yaml
from .features import (
    DUMP_VERSION,
    LevelFeatures,
    load_feature_dump,
    save_feature_dump,
)
from .output import (
    FORMAT_VERSION,
    read_histogram,
    read_yaml,
    write_histogram,
    write_yaml,
)

__all__ = [
    "DUMP_VERSION",
    "FORMAT_VERSION",
    "LevelFeatures",
    "RunConfig",
    "load_feature_dump",
    "load_model_config",
    "load_scene_sources",
    "load_yaml",
    "read_histogram",
    "read_yaml",
    "save_feature_dump",
    "write_histogram",
    "write_yaml",
]
