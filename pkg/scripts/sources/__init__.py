"""
Scene sources, signal-subset augmentation and multi-source batch mixing.
"""

from .augmentation import (
    DEFAULT_SUBSETS,
    VIRTUAL_COLOR,
    VIRTUAL_NORMAL,
    DomainRegistry,
    SourceDescriptor,
    augment_sources,
    full_signals,
    project_signals,
    random_crop,
    random_rotate,
    realize_variant,
    virtualize_signals,
)
from .base import SceneSource
from .factory import create_source
from .local import PlySceneSource
from .mixing import BatchSlot, MixSchedule, draw_batch, mix_batches
from .synthetic import NoisyVolumeSceneSource, PlaneSceneSource

__all__ = [
    "DEFAULT_SUBSETS",
    "VIRTUAL_COLOR",
    "VIRTUAL_NORMAL",
    "BatchSlot",
    "DomainRegistry",
    "MixSchedule",
    "NoisyVolumeSceneSource",
    "PlaneSceneSource",
    "PlySceneSource",
    "SceneSource",
    "SourceDescriptor",
    "augment_sources",
    "create_source",
    "draw_batch",
    "full_signals",
    "mix_batches",
    "project_signals",
    "random_crop",
    "random_rotate",
    "realize_variant",
    "virtualize_signals",
]
