"""
Structured-text outputs; every file carries a format version.
"""

from pathlib import Path
from typing import Any

import yaml

from discrepancy import NormalizedCumulativeHistogram
from errors import ParseError

FORMAT_VERSION = 1


def write_yaml(path: str | Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"format_version": FORMAT_VERSION, **payload}
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(document, f, sort_keys=False)
    return path


def read_yaml(path: str | Path) -> dict[str, Any]:
    """Raises ParseError for unreadable files or another format version."""
    try:
        with open(path, encoding="utf-8") as f:
            document = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ParseError(f"Cannot read {path}: {e}") from e
    if not isinstance(document, dict):
        raise ParseError(f"{path}: expected a mapping")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported format_version {version!r}")
    return document


def write_histogram(path: str | Path, histogram: NormalizedCumulativeHistogram) -> Path:
    return write_yaml(path, histogram.as_dict())


def read_histogram(path: str | Path) -> NormalizedCumulativeHistogram:
    document = read_yaml(path)
    try:
        return NormalizedCumulativeHistogram.from_dict(document)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: not a histogram ({e})") from e
