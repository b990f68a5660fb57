"""
Encoder configuration.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from crse import CrseMode
from errors import ConfigError, MaskError
from scene_io import Signal, mask_code, parse_mask


class DomainSpec(BaseModel):
    """A registered domain and the signals its clouds carry, e.g. "pcn"."""

    model_config = ConfigDict(frozen=True)

    name: str
    signals: str = "pcn"

    @model_validator(mode="after")
    def _positions_present(self):
        try:
            mask = self.mask
        except MaskError as e:
            raise ValueError(str(e)) from e
        if Signal.POSITION not in mask:
            raise ValueError(f"domain {self.name!r} must carry positions")
        return self

    @property
    def mask(self) -> frozenset[Signal]:
        return parse_mask(self.signals)

    @property
    def code(self) -> str:
        return mask_code(self.mask)


class ModelConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    voxel_size: float = Field(default=0.02, gt=0)
    levels: int = Field(default=5, ge=1)
    layer_counts: list[int] = [2, 4, 9, 4, 4]
    window_sizes: list[int] = [5, 7, 7, 7, 7]
    channels: list[int] = [48, 96, 192, 384, 384]
    heads: list[int] = [6, 6, 12, 24, 24]
    crse_mode: CrseMode = CrseMode.VM_DOMAIN_MODULATED
    prompt_count: int = Field(default=5, ge=0)
    divisions_1d: int = Field(default=16, ge=2)
    divisions_2d: int = Field(default=4, ge=2)
    knn_k: int = Field(default=16, ge=1)
    mlp_ratio: int = Field(default=4, ge=1)
    dsln_eps: float = Field(default=1e-5, gt=0)
    block_size: int = Field(default=32, ge=1)
    domains: list[DomainSpec] = [DomainSpec(name="default", signals="pcn")]

    @model_validator(mode="after")
    def _per_level_lists(self):
        for name in ("layer_counts", "window_sizes", "channels", "heads"):
            if len(getattr(self, name)) != self.levels:
                raise ValueError(f"{name} needs one entry per level ({self.levels})")
        if any(v < 1 for v in self.layer_counts + self.window_sizes + self.heads):
            raise ValueError("layer counts, window sizes and heads must be positive")
        for level, (c, h) in enumerate(zip(self.channels, self.heads)):
            if c < 1 or c % h:
                raise ValueError(
                    f"level {level}: {c} channels not divisible by {h} heads"
                )
        if not self.domains:
            raise ValueError("at least one domain is required")
        return self

    @property
    def domain_count(self) -> int:
        return len(self.domains)

    def domain_masks(self) -> list[frozenset[Signal]]:
        return [d.mask for d in self.domains]

    def voxel_size_at(self, level: int) -> float:
        return self.voxel_size * 2.0**level


def parse_model_config(data: dict[str, Any] | None) -> ModelConfig:
    """Validate a config mapping.

    Raises:
        ConfigError: If any field is missing, mistyped or inconsistent
    """
    try:
        return ModelConfig.model_validate(data or {})
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "config"
        raise ConfigError(f"Invalid model config at {location}: {first['msg']}") from e
