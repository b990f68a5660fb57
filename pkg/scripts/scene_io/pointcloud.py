"""
Point cloud container shared by every module.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from errors import DataError, MaskError

NORMAL_TOLERANCE = 1e-4


class Signal(StrEnum):
    POSITION = "position"
    COLOR = "color"
    NORMAL = "normal"

    @property
    def code(self) -> str:
        return self.value[0]


SIGNAL_ORDER = (Signal.POSITION, Signal.COLOR, Signal.NORMAL)
FULL_MASK = frozenset(SIGNAL_ORDER)


def parse_mask(spec: str | Iterable[str]) -> frozenset[Signal]:
    """Parse a signal mask from a short code ("pcn"), names, or a mix of both.

    Raises:
        MaskError: If a token names no known signal
    """
    if isinstance(spec, str):
        tokens = [t for t in spec.replace(",", " ").split() if t]
        if len(tokens) == 1 and tokens[0] not in Signal._value2member_map_:
            tokens = list(tokens[0])
    else:
        tokens = list(spec)

    by_code = {s.code: s for s in SIGNAL_ORDER}
    mask = set()
    for token in tokens:
        if isinstance(token, Signal):
            mask.add(token)
        elif token in by_code:
            mask.add(by_code[token])
        elif token in Signal._value2member_map_:
            mask.add(Signal(token))
        else:
            raise MaskError(f"Unknown signal: {token!r}")
    return frozenset(mask)


def mask_code(mask: Iterable[Signal]) -> str:
    """Canonical short code of a mask, e.g. {position, normal} -> "pn"."""
    mask = set(mask)
    return "".join(s.code for s in SIGNAL_ORDER if s in mask)


def _frozen(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True).reshape(-1, 3)
    if not np.all(np.isfinite(array)):
        raise DataError(f"Non-finite {name} component")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Points with per-point signals; the signal mask follows from which arrays are set.

    Arrays are copied to read-only float64 on construction.
    """

    positions: np.ndarray
    colors: np.ndarray | None = None
    normals: np.ndarray | None = None
    domain_id: int | None = None

    def __post_init__(self):
        positions = _frozen(self.positions, "position")
        object.__setattr__(self, "positions", positions)

        if self.colors is not None:
            colors = _frozen(self.colors, "color")
            if colors.shape != positions.shape:
                raise DataError("Color array does not match point count")
            if colors.size and (colors.min() < 0.0 or colors.max() > 1.0):
                raise DataError("Color components must lie in [0, 1]")
            object.__setattr__(self, "colors", colors)

        if self.normals is not None:
            normals = _frozen(self.normals, "normal")
            if normals.shape != positions.shape:
                raise DataError("Normal array does not match point count")
            lengths = np.linalg.norm(normals, axis=1)
            if np.any(np.abs(lengths - 1.0) > NORMAL_TOLERANCE):
                raise DataError("Normals must be unit length")
            object.__setattr__(self, "normals", normals)

    @property
    def signal_mask(self) -> frozenset[Signal]:
        mask = {Signal.POSITION}
        if self.colors is not None:
            mask.add(Signal.COLOR)
        if self.normals is not None:
            mask.add(Signal.NORMAL)
        return frozenset(mask)

    def __len__(self) -> int:
        return self.positions.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return (
            self.domain_id == other.domain_id
            and _same(self.positions, other.positions)
            and _same(self.colors, other.colors)
            and _same(self.normals, other.normals)
        )

    __hash__ = None

    def signal(self, signal: Signal) -> np.ndarray:
        """Return the (N, 3) array of one signal.

        Raises:
            MaskError: If the signal is not present
        """
        array = {
            Signal.POSITION: self.positions,
            Signal.COLOR: self.colors,
            Signal.NORMAL: self.normals,
        }[Signal(signal)]
        if array is None:
            raise MaskError(f"Point cloud has no {signal} signal")
        return array

    def take(self, indices) -> "PointCloud":
        """Sub-cloud of the given point indices, in that order."""
        indices = np.asarray(indices, dtype=np.int64)
        return PointCloud(
            self.positions[indices],
            None if self.colors is None else self.colors[indices],
            None if self.normals is None else self.normals[indices],
            self.domain_id,
        )

    def with_domain(self, domain_id: int | None) -> "PointCloud":
        return PointCloud(self.positions, self.colors, self.normals, domain_id)


def _same(a: np.ndarray | None, b: np.ndarray | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.shape == b.shape and bool(np.array_equal(a, b))
