"""
Binary dump of per-level encoder features.

Layout, little-endian: magic "S3FD", u16 version, u32 level count, then per
level u32 voxel count, u32 channel count, int32 coords (n, 3) and float32
features (n, c), both row-major.
"""

import struct
from pathlib import Path
from typing import NamedTuple

import numpy as np

from errors import ParseError, ShapeError
from voxels import SparseVoxelGrid

MAGIC = b"S3FD"
DUMP_VERSION = 1
_HEADER = struct.Struct("<4sHI")
_LEVEL = struct.Struct("<II")


class LevelFeatures(NamedTuple):
    coords: np.ndarray
    features: np.ndarray


def save_feature_dump(grids: list[SparseVoxelGrid], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as stream:
        stream.write(_HEADER.pack(MAGIC, DUMP_VERSION, len(grids)))
        for grid in grids:
            if grid.features is None:
                raise ShapeError(f"level {grid.level} carries no features")
            n, c = grid.features.shape
            stream.write(_LEVEL.pack(n, c))
            stream.write(np.ascontiguousarray(grid.coords, dtype="<i4").tobytes())
            stream.write(np.ascontiguousarray(grid.features, dtype="<f4").tobytes())
    return path


def _read(stream, size: int, what: str) -> bytes:
    data = stream.read(size)
    if len(data) != size:
        raise ParseError(f"feature dump truncated in {what}")
    return data


def load_feature_dump(path: str | Path) -> list[LevelFeatures]:
    """Raises ParseError on a wrong magic, version or a truncated file."""
    try:
        stream = open(path, "rb")
    except OSError as e:
        raise ParseError(f"Cannot open {path}: {e}") from e
    with stream:
        magic, version, levels = _HEADER.unpack(_read(stream, _HEADER.size, "header"))
        if magic != MAGIC:
            raise ParseError(f"{path} is not a feature dump")
        if version != DUMP_VERSION:
            raise ParseError(f"unsupported feature dump version {version}")
        result = []
        for level in range(levels):
            n, c = _LEVEL.unpack(_read(stream, _LEVEL.size, f"level {level}"))
            coords = np.frombuffer(
                _read(stream, 12 * n, f"level {level} coords"), "<i4"
            )
            features = np.frombuffer(
                _read(stream, 4 * n * c, f"level {level} features"), "<f4"
            )
            result.append(LevelFeatures(coords.reshape(n, 3), features.reshape(n, c)))
        if stream.read(1):
            raise ParseError("trailing bytes after the last level")
    return result
