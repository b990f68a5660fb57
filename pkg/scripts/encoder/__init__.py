"""
Multi-source sparse voxel encoder.
"""

from .checkpoint import CHECKPOINT_FORMAT_VERSION, load_checkpoint, save_checkpoint
from .config import DomainSpec, ModelConfig, parse_model_config
from .forward import block_forward, calibrate, check_input, downsample, forward
from .model import (
    BlockParams,
    DownsampleParams,
    MLPParams,
    Model,
    StageParams,
    build_block,
    build_model,
)
from .params import ParameterBreakdown, count_parameters

__all__ = [
    "CHECKPOINT_FORMAT_VERSION",
    "BlockParams",
    "DomainSpec",
    "DownsampleParams",
    "MLPParams",
    "Model",
    "ModelConfig",
    "ParameterBreakdown",
    "StageParams",
    "block_forward",
    "build_block",
    "build_model",
    "calibrate",
    "check_input",
    "count_parameters",
    "downsample",
    "forward",
    "load_checkpoint",
    "parse_model_config",
    "save_checkpoint",
]
