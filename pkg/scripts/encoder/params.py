"""
Parameter accounting by category.
"""

from dataclasses import dataclass, field

from .model import BlockParams, Model


@dataclass
class ParameterBreakdown:
    """Learnable parameter counts.

    embedding: per-domain kernels and normalization affines (frozen
        statistics excluded).
    blocks_shared: projections, shared table entries and MLPs.
    blocks_domain_specific: DSLN affines, voxel prompts and modulation scalars.
    other: downsample norms and projections.
    """

    embedding: int = 0
    blocks_shared: int = 0
    blocks_domain_specific: int = 0
    other: int = 0
    modulation_per_block: list[int] = field(default_factory=list)

    @property
    def total(self) -> int:
        blocks = self.blocks_shared + self.blocks_domain_specific
        return self.embedding + blocks + self.other

    def as_dict(self) -> dict[str, int | list[int]]:
        return {
            "embedding": self.embedding,
            "blocks_shared": self.blocks_shared,
            "blocks_domain_specific": self.blocks_domain_specific,
            "other": self.other,
            "total": self.total,
            "modulation_per_block": list(self.modulation_per_block),
        }


def _block_counts(block: BlockParams) -> tuple[int, int, int]:
    shared = sum(a.size for a in block.proj.named_arrays().values())
    shared += block.tables.shared_parameter_count()
    shared += sum(a.size for a in block.mlp.named_arrays().values())

    modulation = block.tables.modulation_parameter_count()
    specific = modulation + block.prompts.features.size
    for norm in (block.norm1, block.norm2):
        specific += norm.gamma.size + norm.beta.size
    return shared, specific, modulation


def count_parameters(model: Model) -> ParameterBreakdown:
    breakdown = ParameterBreakdown()
    for domain in model.embedding.domains:
        breakdown.embedding += domain.kernel.size + domain.gamma.size + domain.beta.size
    for stage in model.stages:
        if stage.downsample is not None:
            norm = stage.downsample.norm
            breakdown.other += norm.gamma.size + norm.beta.size
            breakdown.other += stage.downsample.weight.size
        for block in stage.blocks:
            shared, specific, modulation = _block_counts(block)
            breakdown.blocks_shared += shared
            breakdown.blocks_domain_specific += specific
            breakdown.modulation_per_block.append(modulation)
    return breakdown
