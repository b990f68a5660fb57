"""
Signal-subset augmentation, virtual signals and training-time cloud transforms.
"""

from collections.abc import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from errors import EmptyInputError, MaskError, RangeError, SubsetError
from scene_io import FULL_MASK, PointCloud, Signal, mask_code, parse_mask

VIRTUAL_COLOR = (0.5, 0.5, 0.5)
VIRTUAL_NORMAL = (0.0, 0.0, 1.0)
DEFAULT_SUBSETS = ("p", "pc", "pn", "pcn")
DEFAULT_CROP_SIZE = 5.0
CROP_RETRIES = 16


class SourceDescriptor(BaseModel):
    """One signal-subset variant of a dataset, registered as its own domain."""

    model_config = ConfigDict(frozen=True)

    dataset: str
    signals: frozenset[Signal]
    domain_id: int

    @property
    def code(self) -> str:
        return mask_code(self.signals)

    @property
    def name(self) -> str:
        return f"{self.dataset}_{self.code}"


class DomainRegistry:
    """Consecutive domain ids for (dataset, signal subset) descriptors."""

    def __init__(self, descriptors: Iterable[SourceDescriptor] = ()):
        self.descriptors: list[SourceDescriptor] = list(descriptors)

    def __len__(self) -> int:
        return len(self.descriptors)

    def register(self, dataset: str, signals: Iterable[Signal]) -> SourceDescriptor:
        descriptor = SourceDescriptor(
            dataset=dataset, signals=frozenset(signals), domain_id=len(self)
        )
        self.descriptors.append(descriptor)
        return descriptor

    def masks(self) -> list[frozenset[Signal]]:
        return [d.signals for d in self.descriptors]


def augment_sources(
    dataset: str,
    dataset_signals: Iterable[Signal] | str,
    subsets: Sequence[Iterable[Signal] | str] | None = None,
    registry: DomainRegistry | None = None,
) -> list[SourceDescriptor]:
    """Expand a dataset into one descriptor per signal subset.

    Without explicit subsets, every default subset the dataset can realize is
    used ({p}, {p,c}, {p,n}, {p,c,n} restricted to its signals).

    Raises:
        SubsetError: If a subset lacks positions or asks for absent signals
    """
    available = parse_mask(dataset_signals)
    if subsets is None:
        masks = [parse_mask(s) for s in DEFAULT_SUBSETS]
        masks = [m for m in masks if m <= available]
    else:
        masks = [parse_mask(s) for s in subsets]
    registry = DomainRegistry() if registry is None else registry

    for mask in masks:
        if Signal.POSITION not in mask:
            raise SubsetError(f"Subset {mask_code(mask)!r} does not contain positions")
        if not mask <= available:
            raise SubsetError(
                f"Subset {mask_code(mask)!r} is not available in {dataset!r} "
                f"({mask_code(available)!r})"
            )
    return [registry.register(dataset, mask) for mask in masks]


def virtualize_signals(pc: PointCloud, target: Iterable[Signal] | str) -> PointCloud:
    """Fill missing signals with one constant per channel so every pairwise
    delta on them is exactly zero. Existing channels are kept bitwise.

    Raises:
        MaskError: If the target drops a signal the cloud carries
    """
    target = parse_mask(target)
    if not pc.signal_mask <= target:
        raise MaskError(
            f"Cannot virtualize {mask_code(pc.signal_mask)!r} to "
            f"{mask_code(target)!r}; project the cloud instead"
        )
    shape = pc.positions.shape
    colors, normals = pc.colors, pc.normals
    if Signal.COLOR in target and colors is None:
        colors = np.broadcast_to(np.array(VIRTUAL_COLOR), shape)
    if Signal.NORMAL in target and normals is None:
        normals = np.broadcast_to(np.array(VIRTUAL_NORMAL), shape)
    return PointCloud(pc.positions, colors, normals, pc.domain_id)


def project_signals(pc: PointCloud, target: Iterable[Signal] | str) -> PointCloud:
    """Drop the signals outside ``target``; positions are untouched.

    Raises:
        MaskError: If the target lacks positions or names absent signals
    """
    target = parse_mask(target)
    if Signal.POSITION not in target or not target <= pc.signal_mask:
        raise MaskError(
            f"Cannot project {mask_code(pc.signal_mask)!r} to {mask_code(target)!r}"
        )
    return PointCloud(
        pc.positions,
        pc.colors if Signal.COLOR in target else None,
        pc.normals if Signal.NORMAL in target else None,
        pc.domain_id,
    )


def realize_variant(pc: PointCloud, descriptor: SourceDescriptor) -> PointCloud:
    """The cloud a descriptor stands for: projected and tagged with its domain."""
    return project_signals(pc, descriptor.signals).with_domain(descriptor.domain_id)


def full_signals(pc: PointCloud) -> np.ndarray:
    """(N, 9) position, color, normal values with virtual fill for absent ones."""
    virtual = virtualize_signals(pc, FULL_MASK)
    return np.hstack([virtual.positions, virtual.colors, virtual.normals])


def random_crop(
    pc: PointCloud,
    rng: np.random.Generator,
    size: float = DEFAULT_CROP_SIZE,
    retries: int = CROP_RETRIES,
) -> PointCloud:
    """Axis-aligned cube of edge ``size`` with its corner uniform in the
    feasible box; retried until the crop holds at least one point.

    Raises:
        EmptyInputError: If the cloud is empty or every attempt came up empty
    """
    if size <= 0:
        raise RangeError("crop size must be positive")
    if len(pc) == 0:
        raise EmptyInputError("cannot crop an empty point cloud")
    lo = pc.positions.min(axis=0)
    hi = np.maximum(lo, pc.positions.max(axis=0) - size)
    for _ in range(retries):
        corner = rng.uniform(lo, hi)
        upper = corner + size
        inside = np.all((pc.positions >= corner) & (pc.positions < upper), axis=1)
        if np.any(inside):
            return pc.take(np.flatnonzero(inside))
    raise EmptyInputError(f"no non-empty crop after {retries} attempts")


def random_rotate(pc: PointCloud, rng: np.random.Generator) -> PointCloud:
    """Rotate about the vertical axis by a uniform angle; normals follow."""
    angle = rng.uniform(0.0, 2.0 * np.pi)
    c, s = np.cos(angle), np.sin(angle)
    rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    normals = None if pc.normals is None else pc.normals @ rotation.T
    return PointCloud(pc.positions @ rotation.T, pc.colors, normals, pc.domain_id)
