"""
Encoder forward pass: embedding, stages of windowed blocks, KNN downsampling.
"""

from collections.abc import Sequence
from dataclasses import replace

import numpy as np

from attention import AttentionWindow, window_attention_forward
from crse import QuantizerSpec
from domain_layers import calibrate_embedding, dsln, initial_embed
from errors import DomainError, EmptyInputError, SignalMaskError
from scene_io import PointCloud, mask_code
from sources import full_signals
from voxels import (
    SparseVoxelGrid,
    WindowPartition,
    build_hierarchy,
    knn_pool_downsample,
    partition_windows,
    voxelize,
)

from .model import BlockParams, DownsampleParams, Model


def block_forward(
    features: np.ndarray,
    signals: np.ndarray,
    partition: WindowPartition,
    quantizer: QuantizerSpec,
    block: BlockParams,
    domain: int,
) -> np.ndarray:
    """x + attention(DSLN(x)) per window, then x + MLP(DSLN(x))."""
    normalized = dsln(features, domain, block.norm1)
    prompts = block.prompts.for_domain(domain)
    attended = np.zeros_like(features)
    for window in partition.windows:
        members = window.members
        attended[members] = window_attention_forward(
            AttentionWindow(normalized[members], signals[members], quantizer),
            prompts,
            block.proj,
            block.tables,
            block.attention,
            domain,
        )
    features = features + attended
    return features + block.mlp(dsln(features, domain, block.norm2))


def downsample(
    features: np.ndarray,
    fine: SparseVoxelGrid,
    coarse: SparseVoxelGrid,
    params: DownsampleParams,
    domain: int,
    k: int,
) -> np.ndarray:
    """DSLN, bias-free projection, then max over the k nearest fine voxels."""
    projected = dsln(features, domain, params.norm) @ params.weight
    return knn_pool_downsample(projected, fine, coarse, k)


def check_input(model: Model, pc: PointCloud, domain: int) -> None:
    config = model.config
    if not 0 <= int(domain) < config.domain_count:
        raise DomainError(
            f"domain {domain} outside registered range [0, {config.domain_count})"
        )
    expected = config.domains[int(domain)].mask
    if pc.signal_mask != expected:
        raise SignalMaskError(
            f"cloud carries {mask_code(pc.signal_mask)!r}, domain "
            f"{config.domains[int(domain)].name!r} expects {mask_code(expected)!r}"
        )


def forward(model: Model, pc: PointCloud, domain: int) -> list[SparseVoxelGrid]:
    """Encoder features at every level, as grids carrying their features.

    Blocks alternate between regular and shifted windows, starting regular.

    Raises:
        DomainError: If the domain is not registered
        SignalMaskError: If the cloud's signals differ from the domain's
        EmptyInputError: If the cloud has no points
    """
    check_input(model, pc, domain)
    config = model.config
    domain = int(domain)
    hierarchy = build_hierarchy(voxelize(pc, config.voxel_size), config.levels)

    outputs = []
    features = initial_embed(hierarchy[0], domain, model.embedding)
    for stage in model.stages:
        grid = hierarchy[stage.level]
        if stage.downsample is not None:
            features = downsample(
                features,
                hierarchy[stage.level - 1],
                grid,
                stage.downsample,
                domain,
                config.knn_k,
            )
        signals = full_signals(grid.points)
        quantizer = QuantizerSpec.for_window(
            stage.window_size,
            grid.voxel_size,
            signals.shape[1],
            config.divisions_1d,
            config.divisions_2d,
        )
        partitions = [
            partition_windows(grid, stage.window_size, shifted)
            for shifted in (False, True)
        ]
        for index, block in enumerate(stage.blocks):
            features = block_forward(
                features, signals, partitions[index % 2], quantizer, block, domain
            )
        outputs.append(grid.with_features(features))
    return outputs


def calibrate(model: Model, clouds: Sequence[PointCloud], domain: int) -> Model:
    """Model whose embedding statistics for ``domain`` are frozen over the
    finest grids of ``clouds``; every other parameter is shared.

    Raises:
        EmptyInputError: If no clouds are given
        DomainError: If the domain is not registered
        SignalMaskError: If a cloud's signals differ from the domain's
    """
    if not clouds:
        raise EmptyInputError("calibration needs at least one cloud")
    for pc in clouds:
        check_input(model, pc, domain)
    grids = [voxelize(pc, model.config.voxel_size) for pc in clouds]
    embedding = calibrate_embedding(grids, int(domain), model.embedding)
    return replace(model, embedding=embedding)
