"""
Deterministic multi-source batch scheduling.
"""

from collections.abc import Mapping, Sequence
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from errors import EmptyInputError, RangeError
from scene_io import PointCloud

from .augmentation import DEFAULT_CROP_SIZE, random_crop, random_rotate


class BatchSlot(NamedTuple):
    source: str
    seed: int


class MixSchedule(BaseModel):
    """Integer batch ratios per source, e.g. {"synthetic": 2, "scanned": 1}."""

    model_config = ConfigDict(frozen=True)

    ratios: dict[str, int]

    @field_validator("ratios")
    @classmethod
    def _positive(cls, ratios: dict[str, int]) -> dict[str, int]:
        if not ratios:
            raise ValueError("at least one source is required")
        for name, ratio in ratios.items():
            if ratio < 1:
                raise ValueError(f"ratio of {name!r} must be positive")
        return ratios

    @property
    def cycle(self) -> list[str]:
        """One cycle: sources by descending ratio then name, each repeated
        ratio times."""
        order = sorted(self.ratios, key=lambda name: (-self.ratios[name], name))
        return [name for name in order for _ in range(self.ratios[name])]


def mix_batches(
    schedule: MixSchedule | Mapping[str, int], seed: int, batches: int
) -> list[BatchSlot]:
    """Return ``batches`` slots repeating the schedule's cycle.

    Every slot carries its own seed spawned from ``seed``; it drives the crop
    and rotation of that batch.

    Raises:
        RangeError: If a ratio is not positive
    """
    if not isinstance(schedule, MixSchedule):
        try:
            schedule = MixSchedule(ratios=dict(schedule))
        except ValidationError as e:
            raise RangeError(f"Invalid mix ratios: {e.errors()[0]['msg']}") from e
    cycle = schedule.cycle
    children = np.random.SeedSequence(seed).spawn(batches)
    return [
        BatchSlot(cycle[index % len(cycle)], int(child.generate_state(1)[0]))
        for index, child in enumerate(children)
    ]


def draw_batch(
    scenes: Sequence[PointCloud], slot: BatchSlot, size: float = DEFAULT_CROP_SIZE
) -> PointCloud:
    """Scene choice, crop and rotation of one batch, all drawn from the slot seed.

    Raises:
        EmptyInputError: If the slot's source has no scenes
    """
    if not scenes:
        raise EmptyInputError(f"source {slot.source!r} has no scenes")
    rng = np.random.default_rng(slot.seed)
    scene = scenes[int(rng.integers(len(scenes)))]
    return random_rotate(random_crop(scene, rng, size), rng)
