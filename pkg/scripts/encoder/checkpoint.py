"""
Model checkpoints: one .npz bundle of named parameter arrays plus the config.
"""

import zipfile
from pathlib import Path

import numpy as np
import yaml

from errors import ParseError

from .config import parse_model_config
from .model import Model, build_model

CHECKPOINT_FORMAT_VERSION = 1
_META_KEYS = ("format_version", "config_yaml")


def save_checkpoint(model: Model, path: str | Path) -> Path:
    path = Path(path)
    config_yaml = yaml.safe_dump(model.config.model_dump(mode="json"), sort_keys=True)
    arrays = {
        "format_version": np.array(CHECKPOINT_FORMAT_VERSION, dtype=np.int64),
        "config_yaml": np.frombuffer(config_yaml.encode("utf-8"), dtype=np.uint8),
    }
    arrays.update(model.named_arrays())
    with open(path, "wb") as stream:
        np.savez(stream, **arrays)
    return path


def load_checkpoint(path: str | Path) -> Model:
    """Rebuild the model from its stored config and overwrite every parameter.

    Raises:
        ParseError: If the bundle is unreadable, of another version, or its
            arrays do not match the stored config
        ConfigError: If the stored config is invalid
    """
    try:
        with np.load(Path(path), allow_pickle=False) as bundle:
            stored = {name: bundle[name] for name in bundle.files}
    except (OSError, ValueError, zipfile.BadZipFile) as e:
        raise ParseError(f"Unreadable checkpoint {path}: {e}") from e

    if any(key not in stored for key in _META_KEYS):
        raise ParseError("checkpoint lacks format_version or config")
    version = int(stored["format_version"])
    if version != CHECKPOINT_FORMAT_VERSION:
        raise ParseError(f"unsupported checkpoint format version {version}")
    try:
        config_data = yaml.safe_load(stored["config_yaml"].tobytes().decode("utf-8"))
    except (UnicodeDecodeError, yaml.YAMLError) as e:
        raise ParseError(f"checkpoint config is not valid YAML: {e}") from e

    model = build_model(parse_model_config(config_data), seed=0)
    targets = model.named_arrays()
    names = set(stored) - set(_META_KEYS)
    if names != set(targets):
        missing = sorted(set(targets) - names)[:3]
        extra = sorted(names - set(targets))[:3]
        raise ParseError(
            f"checkpoint arrays mismatch (missing {missing}, extra {extra})"
        )
    for name, target in targets.items():
        if stored[name].shape != target.shape:
            raise ParseError(f"{name}: shape {stored[name].shape} != {target.shape}")
        target[...] = stored[name]
    return model
