"""
H-divergence between two sources and the baseline domain classifier.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from numbers import Real

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import PredefinedSplit, cross_val_predict
from sklearn.pipeline import Pipeline, make_pipeline
from sklearn.preprocessing import StandardScaler

from errors import DataError, RangeError
from scene_io import PointCloud
from sources import random_crop

from .histogram import DEFAULT_BINS
from .statistics import (
    OCCUPANCY,
    as_signal,
    signal_variance_stats,
    window_occupancy_stats,
)

MIN_CROPS = 20
CV_FOLDS = 5
DEFAULT_CROP_SIZE = 5.0
DEFAULT_FEATURES = (OCCUPANCY, "position")


@dataclass(frozen=True)
class DivergenceReport:
    err_source: float
    err_target: float
    d_h: float

    @property
    def worse_than_chance(self) -> bool:
        """The classifier errs more often than it is right; d_H is negative."""
        return self.err_source + self.err_target > 1.0

    def as_dict(self) -> dict:
        return {
            "err_source": self.err_source,
            "err_target": self.err_target,
            "d_h": self.d_h,
            "worse_than_chance": self.worse_than_chance,
        }


def h_divergence(err_source: float, err_target: float) -> DivergenceReport:
    """d_H = 2 * (1 - (err_source + err_target)) for one trained classifier.

    Raises:
        RangeError: If an error rate is not a number in [0, 1]
    """
    for name, value in (("err_source", err_source), ("err_target", err_target)):
        if not isinstance(value, Real) or math.isnan(value):
            raise RangeError(f"{name} must be a number")
        if not 0.0 <= value <= 1.0:
            raise RangeError(f"{name}={value} outside [0, 1]")
    err_source, err_target = float(err_source), float(err_target)
    return DivergenceReport(
        err_source, err_target, 2.0 * (1.0 - (err_source + err_target))
    )


def random_crops(
    pc: PointCloud, count: int, size: float = DEFAULT_CROP_SIZE, seed: int = 0
) -> list[PointCloud]:
    rng = np.random.default_rng(seed)
    return [random_crop(pc, rng, size) for _ in range(count)]


def crop_features(
    crop: PointCloud,
    voxel_size: float,
    window_size: int,
    bins: int = DEFAULT_BINS,
    features: Sequence[str] = DEFAULT_FEATURES,
) -> np.ndarray:
    """Concatenated cumulative curves, ``bins`` values per requested statistic.

    ``features`` names "occupancy" and any of the signals; a signal missing
    from the crop raises SignalMaskError.
    """
    if not features:
        raise RangeError("at least one feature is required")
    curves = []
    for name in features:
        if name == OCCUPANCY:
            histogram = window_occupancy_stats(crop, voxel_size, window_size, bins)
        else:
            histogram = signal_variance_stats(
                crop, voxel_size, window_size, as_signal(name), bins
            )
        curves.append(histogram.cumulative)
    return np.concatenate(curves)


def _group_folds(groups: np.ndarray, folds: int, seed: int) -> np.ndarray:
    # Depends only on the group ids and seed, so both sources split alike.
    ids, inverse = np.unique(groups, return_inverse=True)
    order = np.random.default_rng(seed).permutation(ids.size)
    return (order % folds)[inverse.ravel()]


def _as_groups(groups: Sequence[int] | None, count: int, name: str) -> np.ndarray:
    if groups is None:
        return np.arange(count)
    groups = np.asarray(groups)
    if groups.shape != (count,):
        raise DataError(f"{name} needs one group id per crop")
    return groups


def fit_domain_classifier(
    features_source: np.ndarray,
    features_target: np.ndarray,
    seed: int,
    groups_source: Sequence[int] | None = None,
    groups_target: Sequence[int] | None = None,
) -> tuple[Pipeline, DivergenceReport]:
    """Standardized logistic regression separating source from target crops.

    Crops are scored out of fold: each group (usually a scene) sits in exactly
    one of up to five folds, and its crops are predicted by a classifier that
    never saw the group. The report holds these out-of-fold error rates; the
    returned classifier is refit on every crop. Without groups each crop is its
    own group.

    Raises:
        DataError: If either source has fewer than 20 crops or fewer than two
            groups, or the features disagree in width or are not finite
    """
    xs = np.asarray(features_source, dtype=np.float64)
    xt = np.asarray(features_target, dtype=np.float64)
    for name, x in (("source", xs), ("target", xt)):
        if x.ndim != 2 or x.shape[0] < MIN_CROPS:
            raise DataError(f"{name} needs at least {MIN_CROPS} crops")
        if not np.all(np.isfinite(x)):
            raise DataError(f"{name} features are not finite")
    if xs.shape[1] != xt.shape[1]:
        raise DataError(f"feature widths differ ({xs.shape[1]} vs {xt.shape[1]})")

    gs = _as_groups(groups_source, xs.shape[0], "source")
    gt = _as_groups(groups_target, xt.shape[0], "target")
    folds = min(CV_FOLDS, np.unique(gs).size, np.unique(gt).size)
    if folds < 2:
        raise DataError("each source needs crops from at least two groups")
    test_fold = np.concatenate(
        [_group_folds(gs, folds, seed), _group_folds(gt, folds, seed)]
    )

    x = np.vstack([xs, xt])
    y = np.concatenate([np.zeros(xs.shape[0], int), np.ones(xt.shape[0], int)])
    classifier = make_pipeline(
        StandardScaler(), LogisticRegression(max_iter=1000, random_state=seed)
    )
    predicted = cross_val_predict(classifier, x, y, cv=PredefinedSplit(test_fold))
    err_source = float(np.mean(predicted[: xs.shape[0]] != 0))
    err_target = float(np.mean(predicted[xs.shape[0] :] != 1))
    classifier.fit(x, y)
    return classifier, h_divergence(err_source, err_target)


def _scene_crops(
    scenes: Sequence[PointCloud], crops_per_scene: int, size: float, seed: int
) -> tuple[list[PointCloud], np.ndarray]:
    crops, groups = [], []
    for index, scene in enumerate(scenes):
        scene_seed = np.random.SeedSequence([seed, index]).generate_state(1)[0]
        cut = random_crops(scene, crops_per_scene, size, int(scene_seed))
        crops.extend(cut)
        groups.extend([index] * len(cut))
    return crops, np.asarray(groups, dtype=np.int64)


def baseline_domain_classifier(
    source_scenes: Sequence[PointCloud],
    target_scenes: Sequence[PointCloud],
    seed: int,
    crops_per_scene: int = 20,
    crop_size: float = DEFAULT_CROP_SIZE,
    voxel_size: float = 0.02,
    window_size: int = 5,
    bins: int = DEFAULT_BINS,
    features: Sequence[str] = DEFAULT_FEATURES,
) -> tuple[Pipeline, DivergenceReport]:
    """Crop both sources, summarize each crop by its window statistics, and
    fit the linear domain classifier.

    Crops of scene k use the same seed in either source, so swapping the
    sources swaps the labels and nothing else. Folds are drawn per scene, so
    crops of one scene never sit on both sides of a split.

    Raises:
        DataError: If either source yields fewer than 20 crops or has fewer
            than two scenes
    """
    if crops_per_scene < 1:
        raise RangeError("crops_per_scene must be positive")

    def featurize(scenes):
        crops, groups = _scene_crops(scenes, crops_per_scene, crop_size, seed)
        if len(crops) < MIN_CROPS:
            raise DataError(f"{len(crops)} crops, at least {MIN_CROPS} required")
        table = np.array(
            [crop_features(c, voxel_size, window_size, bins, features) for c in crops]
        )
        return table, groups

    xs, gs = featurize(source_scenes)
    xt, gt = featurize(target_scenes)
    return fit_domain_classifier(xs, xt, seed, gs, gt)
