"""
PLY reader and writer built on plyfile.

Only the ``vertex`` element is read: x,y,z, optionally red,green,blue (uchar)
and nx,ny,nz. Other elements (faces, edges) are ignored.
"""

from enum import StrEnum
from pathlib import Path

import numpy as np
from plyfile import (
    PlyData,
    PlyElement,
    PlyHeaderParseError,
    PlyListProperty,
    PlyParseError,
)

from errors import DataError, ParseError

from .pointcloud import PointCloud


class PlyFormat(StrEnum):
    ASCII = "ply-ascii"
    BINARY_LE = "ply-binary-le"


_COLOR_FIELDS = ("red", "green", "blue")
_NORMAL_FIELDS = ("nx", "ny", "nz")

# Normals already this close to unit length are kept bit-for-bit.
_RENORMALIZE_SLACK = 1e-12


def _read(path: Path) -> PlyData:
    try:
        return PlyData.read(str(path), mmap=False)
    except PlyHeaderParseError as exc:
        raise ParseError(exc.message, line=exc.line) from None
    except PlyParseError as exc:
        # element/row/property context is part of the message
        raise ParseError(str(exc)) from None
    except UnicodeDecodeError:
        raise ParseError("non-ASCII header") from None


def _detect_format(ply: PlyData) -> PlyFormat:
    if ply.text:
        return PlyFormat.ASCII
    if ply.byte_order == "<":
        return PlyFormat.BINARY_LE
    raise ParseError("big-endian PLY files are not supported")


def _vertex_table(ply: PlyData) -> tuple[np.ndarray, dict[str, str]]:
    elements = {element.name: element for element in ply.elements}
    if "vertex" not in elements:
        raise ParseError("missing 'element vertex'")
    vertex = elements["vertex"]

    kinds = {}
    for prop in vertex.properties:
        if isinstance(prop, PlyListProperty):
            raise ParseError(f"list property {prop.name!r} on vertex")
        kinds[prop.name] = np.dtype(prop.val_dtype).str[1:]

    for axis in ("x", "y", "z"):
        if axis not in kinds:
            raise ParseError(f"vertex property {axis!r} missing")
    for group in (_COLOR_FIELDS, _NORMAL_FIELDS):
        present = [name in kinds for name in group]
        if any(present) and not all(present):
            raise ParseError(f"incomplete property group {group}")
    for name in _COLOR_FIELDS:
        if name in kinds and kinds[name] != "u1":
            raise ParseError(f"color property {name!r} must be uchar")
    return vertex.data, kinds


def load_pointcloud(path: str | Path, format: PlyFormat | None = None) -> PointCloud:
    """Load a PLY file into a PointCloud.

    Colors are rescaled from bytes to [0, 1]; normals are renormalized.

    Args:
        path: PLY file
        format: Expected flavor; detected from the header when omitted

    Raises:
        ParseError: Malformed header or payload
        DataError: Non-finite coordinates or zero-length normals
    """
    ply = _read(Path(path))
    header_format = _detect_format(ply)
    if format is not None and PlyFormat(format) != header_format:
        raise ParseError(f"expected {format}, header declares {header_format}")
    table, kinds = _vertex_table(ply)

    positions = np.stack([table[a].astype(np.float64) for a in ("x", "y", "z")], 1)
    if not np.all(np.isfinite(positions)):
        raise DataError(f"{path}: non-finite vertex coordinate")

    colors = None
    if all(c in kinds for c in _COLOR_FIELDS):
        raw = np.stack([table[c].astype(np.float64) for c in _COLOR_FIELDS], 1)
        colors = raw / 255.0

    normals = None
    if all(n in kinds for n in _NORMAL_FIELDS):
        normals = np.stack([table[n].astype(np.float64) for n in _NORMAL_FIELDS], 1)
        if not np.all(np.isfinite(normals)):
            raise DataError(f"{path}: non-finite normal component")
        lengths = np.linalg.norm(normals, axis=1)
        if np.any(lengths == 0.0):
            raise DataError(f"{path}: zero-length normal")
        rescale = np.abs(lengths - 1.0) > _RENORMALIZE_SLACK
        normals[rescale] /= lengths[rescale, None]

    return PointCloud(positions, colors, normals)


def save_pointcloud(
    pc: PointCloud, path: str | Path, format: PlyFormat = PlyFormat.BINARY_LE
) -> Path:
    """Write a PointCloud as PLY.

    Positions and normals are written as double, colors as uchar.
    """
    path = Path(path)
    fields = [("x", "<f8"), ("y", "<f8"), ("z", "<f8")]
    columns = list(pc.positions.T)
    if pc.colors is not None:
        fields += [(c, "u1") for c in _COLOR_FIELDS]
        columns += list(np.rint(pc.colors * 255.0).astype(np.uint8).T)
    if pc.normals is not None:
        fields += [(n, "<f8") for n in _NORMAL_FIELDS]
        columns += list(pc.normals.T)

    table = np.empty(len(pc), dtype=fields)
    for (name, _), column in zip(fields, columns, strict=True):
        table[name] = column

    text = PlyFormat(format) == PlyFormat.ASCII
    element = PlyElement.describe(table, "vertex")
    PlyData([element], text=text, byte_order="=" if text else "<").write(str(path))
    return path
