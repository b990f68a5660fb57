"""
Domain-specific initial feature embedding: a 3x3x3 sparse convolution over
occupied voxels, batch-style normalization and a rectifier.

Until a domain is calibrated its normalization uses the statistics of the
grid being embedded; calibration freezes dataset statistics.
"""

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from errors import DomainError, EmptyInputError, ShapeError, SignalMaskError
from scene_io import SIGNAL_ORDER, Signal, mask_code
from voxels import SparseVoxelGrid

from .norm import DEFAULT_EPS

KERNEL_OFFSETS = np.array(list(itertools.product((-1, 0, 1), repeat=3)), dtype=np.int64)
KERNEL_INIT_STD = 0.02


def input_channels(signals: Iterable[Signal]) -> int:
    """Positional offset channels plus three per optional signal."""
    signals = set(signals)
    return 3 + 3 * sum(s in signals for s in (Signal.COLOR, Signal.NORMAL))


@dataclass(frozen=True, eq=False)
class DomainEmbedding:
    """Kernel (27, C_in, d) and per-channel statistics of one domain.

    ``calibration_voxels`` counts the voxels the statistics were frozen from;
    zero means uncalibrated.
    """

    signals: frozenset[Signal]
    kernel: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    calibration_voxels: np.ndarray = field(default_factory=lambda: np.zeros(()))
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        expected = (len(KERNEL_OFFSETS), input_channels(self.signals))
        if self.kernel.shape[:2] != expected:
            raise ShapeError(
                f"kernel {self.kernel.shape} does not take the "
                f"{mask_code(self.signals)} inputs {expected}"
            )

    @property
    def d(self) -> int:
        return self.kernel.shape[2]

    @property
    def calibrated(self) -> bool:
        return bool(self.calibration_voxels > 0)

    @classmethod
    def initialize(cls, signals, d: int, rng: np.random.Generator) -> "DomainEmbedding":
        signals = frozenset(signals)
        kernel = rng.normal(
            0.0, KERNEL_INIT_STD, size=(len(KERNEL_OFFSETS), input_channels(signals), d)
        )
        return cls(signals, kernel, np.zeros(d), np.ones(d), np.ones(d), np.zeros(d))

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {
            "kernel": self.kernel,
            "mean": self.mean,
            "var": self.var,
            "gamma": self.gamma,
            "beta": self.beta,
            "calibration_voxels": self.calibration_voxels,
        }


@dataclass(frozen=True, eq=False)
class EmbeddingParams:
    domains: tuple[DomainEmbedding, ...]

    @classmethod
    def initialize(
        cls, masks: Sequence[Iterable[Signal]], d: int, rng: np.random.Generator
    ) -> "EmbeddingParams":
        return cls(tuple(DomainEmbedding.initialize(m, d, rng) for m in masks))

    def domain(self, domain: int) -> DomainEmbedding:
        if not 0 <= int(domain) < len(self.domains):
            raise DomainError(
                f"domain {domain} outside registered range [0, {len(self.domains)})"
            )
        return self.domains[int(domain)]


def embedding_inputs(grid: SparseVoxelGrid) -> np.ndarray:
    """Per-cell raw channels: offset to the cell center, then color and normal
    when the cloud carries them."""
    columns = [grid.offsets()]
    mask = grid.points.signal_mask
    columns += [grid.points.signal(s) for s in SIGNAL_ORDER[1:] if s in mask]
    return np.hstack(columns)


def neighbor_table(coords: np.ndarray) -> np.ndarray:
    """(cells, 27) row of each kernel neighbor, -1 where the cell is empty."""
    coords = np.asarray(coords, dtype=np.int64)
    low = coords.min(axis=0) - 1
    dims = tuple(int(x) for x in coords.max(axis=0) - low + 2)
    keys = np.ravel_multi_index((coords - low).T, dims)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]

    table = np.full((coords.shape[0], len(KERNEL_OFFSETS)), -1, dtype=np.int64)
    for tap, offset in enumerate(KERNEL_OFFSETS):
        wanted = np.ravel_multi_index((coords + offset - low).T, dims)
        slot = np.minimum(np.searchsorted(sorted_keys, wanted), len(keys) - 1)
        found = sorted_keys[slot] == wanted
        table[found, tap] = order[slot[found]]
    return table


def _check_domain_input(grid: SparseVoxelGrid, params: DomainEmbedding) -> None:
    if len(grid) == 0:
        raise EmptyInputError("cannot embed an empty grid")
    if grid.points.signal_mask != params.signals:
        raise SignalMaskError(
            f"grid carries signals {mask_code(grid.points.signal_mask)!r}, domain "
            f"embedding expects {mask_code(params.signals)!r}"
        )


def embedding_preactivation(
    grid: SparseVoxelGrid, params: DomainEmbedding
) -> np.ndarray:
    """Sparse convolution output before normalization, shape (cells, d)."""
    _check_domain_input(grid, params)
    inputs = embedding_inputs(grid)
    neighbors = neighbor_table(grid.coords)
    output = np.zeros((len(grid), params.d))
    for tap in range(len(KERNEL_OFFSETS)):
        present = neighbors[:, tap] >= 0
        if np.any(present):
            output[present] += inputs[neighbors[present, tap]] @ params.kernel[tap]
    return output


def normalize_preactivation(pre: np.ndarray, embedding: DomainEmbedding) -> np.ndarray:
    """Per-channel standardization over all voxels: frozen statistics once the
    domain is calibrated, the statistics of ``pre`` before that."""
    if embedding.calibrated:
        mean, var = embedding.mean, embedding.var
    else:
        mean, var = pre.mean(axis=0), pre.var(axis=0)
    return (pre - mean) / np.sqrt(var + embedding.eps)


def initial_embed(
    grid: SparseVoxelGrid, domain: int, params: EmbeddingParams
) -> np.ndarray:
    """Per-voxel d-vectors of the finest grid for the given domain.

    Raises:
        DomainError: If the domain is not registered
        SignalMaskError: If the grid's signals differ from the domain's mask
    """
    embedding = params.domain(domain)
    normalized = normalize_preactivation(
        embedding_preactivation(grid, embedding), embedding
    )
    return np.maximum(normalized * embedding.gamma + embedding.beta, 0.0)


def calibrate_embedding(
    grids: Sequence[SparseVoxelGrid], domain: int, params: EmbeddingParams
) -> EmbeddingParams:
    """Freeze the domain's normalization statistics at the per-channel mean
    and variance of the pre-activations over every voxel of ``grids``."""
    embedding = params.domain(domain)
    if not grids:
        raise EmptyInputError("calibration needs at least one grid")
    pre = np.vstack([embedding_preactivation(g, embedding) for g in grids])
    calibrated = replace(
        embedding,
        mean=pre.mean(axis=0),
        var=pre.var(axis=0),
        calibration_voxels=np.array(float(pre.shape[0])),
    )
    domains = list(params.domains)
    domains[int(domain)] = calibrated
    return EmbeddingParams(tuple(domains))
