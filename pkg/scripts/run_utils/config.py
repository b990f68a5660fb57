"""
Configuration files and per-invocation run settings.
"""

from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from encoder import ModelConfig, parse_model_config
from errors import ConfigError


def load_yaml(path: str | Path) -> Any:
    """Parse one YAML file.

    Raises:
        ConfigError: If the file is missing or not valid YAML
    """
    try:
        with open(path, encoding="utf-8") as f:
            return yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing {path}: {e}") from e


def load_model_config(path: str | Path) -> ModelConfig:
    return parse_model_config(load_yaml(path))


def load_scene_sources(path: str | Path) -> list[dict[str, Any]]:
    """The ``sources`` list of a scenes file; each entry needs a name and type."""
    data = load_yaml(path) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping with a 'sources' list")
    sources = data.get("sources") or []
    if not isinstance(sources, list):
        raise ConfigError(f"{path}: 'sources' must be a list")
    for index, entry in enumerate(sources):
        if not isinstance(entry, dict) or "name" not in entry or "type" not in entry:
            raise ConfigError(f"{path}: source #{index} needs 'name' and 'type'")
    return sources


class RunConfig(BaseModel):
    """Settings shared by the toolkit commands; input files must exist."""

    model_config = ConfigDict(frozen=True)

    config: Path | None = None
    inputs: list[Path] = []
    domain: int | None = None
    seed: int | None = None
    output: Path | None = None

    @field_validator("config")
    @classmethod
    def _config_exists(cls, value):
        if value is not None and not value.is_file():
            raise ValueError(f"config file not found: {value}")
        return value

    @field_validator("inputs")
    @classmethod
    def _inputs_exist(cls, value):
        missing = [str(p) for p in value if not p.exists()]
        if missing:
            raise ValueError(f"inputs not found: {', '.join(missing)}")
        return value

    @classmethod
    def build(cls, **fields) -> "RunConfig":
        """Validate command flags.

        Raises:
            ConfigError: If a referenced file is missing or a value is mistyped
        """
        try:
            return cls(**fields)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(p) for p in first["loc"]) or "run"
            raise ConfigError(f"--{location}: {first['msg']}") from e

    def model(self) -> ModelConfig:
        if self.config is None:
            return ModelConfig()
        return load_model_config(self.config)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("this command needs --seed")
        return self.seed
