"""
Encoder parameters and their initialization.
"""

import hashlib
from dataclasses import dataclass

import numpy as np
from pydantic import ValidationError

from attention import PARAMETER_INIT_STD, AttentionConfig, ProjectionSet, PromptBank
from crse import LookupTableSet, create_tables, init_tables
from domain_layers import DSLNParams, EmbeddingParams
from errors import ConfigError

from .config import ModelConfig


@dataclass(frozen=True, eq=False)
class MLPParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @classmethod
    def initialize(cls, d: int, hidden: int, rng: np.random.Generator) -> "MLPParams":
        return cls(
            rng.normal(0.0, PARAMETER_INIT_STD, (d, hidden)),
            np.zeros(hidden),
            rng.normal(0.0, PARAMETER_INIT_STD, (hidden, d)),
            np.zeros(d),
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.maximum(x @ self.w1 + self.b1, 0.0) @ self.w2 + self.b2

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}


@dataclass(frozen=True, eq=False)
class BlockParams:
    """Attention, two domain-specific norms and the MLP of one block."""

    attention: AttentionConfig
    proj: ProjectionSet
    tables: LookupTableSet
    prompts: PromptBank
    norm1: DSLNParams
    norm2: DSLNParams
    mlp: MLPParams

    def named_arrays(self) -> dict[str, np.ndarray]:
        arrays = {f"proj.{n}": a for n, a in self.proj.named_arrays().items()}
        arrays.update({f"tables.{n}": a for n, a in self.tables.named_arrays().items()})
        arrays["prompts"] = self.prompts.features
        arrays.update({f"norm1.{n}": a for n, a in self.norm1.named_arrays().items()})
        arrays.update({f"norm2.{n}": a for n, a in self.norm2.named_arrays().items()})
        arrays.update({f"mlp.{n}": a for n, a in self.mlp.named_arrays().items()})
        return arrays


@dataclass(frozen=True, eq=False)
class DownsampleParams:
    """Norm and bias-free projection applied before KNN pooling."""

    norm: DSLNParams
    weight: np.ndarray

    def named_arrays(self) -> dict[str, np.ndarray]:
        arrays = {f"norm.{n}": a for n, a in self.norm.named_arrays().items()}
        arrays["weight"] = self.weight
        return arrays


@dataclass(frozen=True, eq=False)
class StageParams:
    level: int
    window_size: int
    blocks: tuple[BlockParams, ...]
    downsample: DownsampleParams | None = None

    def named_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        if self.downsample is not None:
            downsample = self.downsample.named_arrays()
            arrays.update({f"downsample.{n}": a for n, a in downsample.items()})
        for index, block in enumerate(self.blocks):
            arrays.update(
                {f"blocks.{index}.{n}": a for n, a in block.named_arrays().items()}
            )
        return arrays


@dataclass(frozen=True, eq=False)
class Model:
    config: ModelConfig
    embedding: EmbeddingParams
    stages: tuple[StageParams, ...]

    @property
    def block_count(self) -> int:
        return sum(len(stage.blocks) for stage in self.stages)

    def named_arrays(self) -> dict[str, np.ndarray]:
        """Every parameter array keyed by a dotted path; the arrays are live."""
        arrays = {}
        for index, domain in enumerate(self.embedding.domains):
            arrays.update(
                {f"embedding.{index}.{n}": a for n, a in domain.named_arrays().items()}
            )
        for stage in self.stages:
            prefix = f"stages.{stage.level}"
            arrays.update({f"{prefix}.{n}": a for n, a in stage.named_arrays().items()})
        return arrays

    def checksum(self) -> str:
        digest = hashlib.sha256()
        for name, array in sorted(self.named_arrays().items()):
            digest.update(name.encode())
            digest.update(np.ascontiguousarray(array, dtype="<f8").tobytes())
        return digest.hexdigest()


def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def build_block(
    config: ModelConfig, level: int, rng: np.random.Generator
) -> BlockParams:
    d = config.channels[level]
    domains = config.domain_count
    try:
        attention = AttentionConfig(
            d=d,
            heads=config.heads[level],
            window_size=config.window_sizes[level],
            prompt_count=config.prompt_count,
            crse_mode=config.crse_mode,
            block_size=config.block_size,
        )
    except ValidationError as e:
        raise ConfigError(f"level {level}: {e.errors()[0]['msg']}") from e

    tables = create_tables(
        config.crse_mode, d, 9, domains, config.divisions_1d, config.divisions_2d
    )
    return BlockParams(
        attention=attention,
        proj=ProjectionSet.initialize(d, rng),
        tables=init_tables(tables, _child_seed(rng)),
        prompts=PromptBank.initialize(domains, config.prompt_count, d, rng),
        norm1=DSLNParams.initialize(domains, d, config.dsln_eps),
        norm2=DSLNParams.initialize(domains, d, config.dsln_eps),
        mlp=MLPParams.initialize(d, config.mlp_ratio * d, rng),
    )


def build_model(config: ModelConfig, seed: int) -> Model:
    """All parameters initialized from one seed.

    Tables follow init_tables; projections, MLP weights, prompts and the
    downsample projection are Normal(0, 0.02); norms start at gamma=1, beta=0.
    """
    rng = np.random.default_rng(seed)
    embedding = EmbeddingParams.initialize(
        config.domain_masks(), config.channels[0], rng
    )
    stages = []
    for level in range(config.levels):
        downsample = None
        if level > 0:
            d_in, d_out = config.channels[level - 1], config.channels[level]
            downsample = DownsampleParams(
                DSLNParams.initialize(config.domain_count, d_in, config.dsln_eps),
                rng.normal(0.0, PARAMETER_INIT_STD, (d_in, d_out)),
            )
        blocks = tuple(
            build_block(config, level, rng) for _ in range(config.layer_counts[level])
        )
        stages.append(
            StageParams(level, config.window_sizes[level], blocks, downsample)
        )
    return Model(config, embedding, tuple(stages))
