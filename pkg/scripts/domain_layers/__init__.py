"""
Per-domain normalization and initial embedding layers.
"""

from .embedding import (
    KERNEL_OFFSETS,
    DomainEmbedding,
    EmbeddingParams,
    calibrate_embedding,
    embedding_inputs,
    embedding_preactivation,
    initial_embed,
    input_channels,
    normalize_preactivation,
    neighbor_table,
)
from .norm import DEFAULT_EPS, DSLNParams, dsln, standardize

__all__ = [
    "DEFAULT_EPS",
    "KERNEL_OFFSETS",
    "DSLNParams",
    "DomainEmbedding",
    "EmbeddingParams",
    "calibrate_embedding",
    "dsln",
    "embedding_inputs",
    "embedding_preactivation",
    "initial_embed",
    "input_channels",
    "normalize_preactivation",
    "neighbor_table",
    "standardize",
]
