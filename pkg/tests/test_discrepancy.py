import numpy as np
import pytest

from discrepancy import (
    HistogramAccumulator,
    average_histograms,
    baseline_domain_classifier,
    crop_features,
    fit_domain_classifier,
    h_divergence,
    merge_accumulators,
    pairwise_variance,
    signal_variance_stats,
    variance_bound,
    window_occupancy_ratios,
    window_occupancy_stats,
    window_signal_variances,
)
from errors import DataError, EmptyInputError, RangeError, ShapeError, SignalMaskError
from scene_io import PointCloud, generate_noisy_volume_scene, generate_plane_scene
from sources import project_signals


def test_plane_occupancy(plane_cloud):
    ratios = window_occupancy_ratios(plane_cloud, 0.02, 5)
    assert len(ratios) == 100
    assert np.all(ratios == 0.2)
    histogram = window_occupancy_stats(plane_cloud, 0.02, 5)
    assert histogram.bins == 50
    assert histogram.value_at(0.19) == 0.0
    assert histogram.value_at(0.2) == 1.0
    assert histogram.mass().sum() == pytest.approx(1.0)


def test_single_voxel_occupancy():
    pc = PointCloud(np.array([[0.01, 0.01, 0.01]]))
    np.testing.assert_array_equal(window_occupancy_ratios(pc, 0.02, 5), [1 / 125])


def test_dense_cube_occupancy():
    pc = generate_noisy_volume_scene(20000, 1.0, 0.01, 0.1, seed=2)
    ratios = window_occupancy_ratios(pc, 0.1, 5)
    assert len(ratios) == 8
    assert np.all(ratios == 1.0)


def test_pairwise_variance_small_cases():
    assert pairwise_variance(np.array([0.0, 1.0])) == pytest.approx(0.25)
    assert pairwise_variance(np.array([[3.0, 1.0, 2.0]])) == 0.0


def test_pairwise_variance_is_distance_to_centroid(rng):
    for _ in range(1000):
        values = rng.normal(size=(int(rng.integers(2, 30)), 3))
        centroid = np.mean(np.sum((values - values.mean(axis=0)) ** 2, axis=1))
        assert pairwise_variance(values) == pytest.approx(centroid, abs=1e-10)


def test_pairwise_variance_invariances(rng):
    values = rng.normal(size=(40, 3))
    base = pairwise_variance(values)
    shifted = values + [5.0, -2.0, 0.5]
    assert pairwise_variance(shifted) == pytest.approx(base, rel=1e-12)
    shuffled = values[rng.permutation(40)]
    assert pairwise_variance(shuffled) == pytest.approx(base, rel=1e-12)


def test_variance_bounds():
    assert variance_bound("position", 0.02, 5) == pytest.approx(3 * 0.08**2 / 4)
    assert variance_bound("color", 0.02, 5) == 0.75
    assert variance_bound("normal", 0.02, 5) == 3.0
    with pytest.raises(RangeError):
        variance_bound("intensity", 0.02, 5)


def test_constant_color_has_zero_variance(plane_cloud):
    histogram = signal_variance_stats(plane_cloud, 0.02, 5, "color")
    assert histogram.cumulative[0] == 1.0
    assert histogram.signal == "color"


def test_variances_are_normalized(noisy_cloud):
    variances = window_signal_variances(noisy_cloud, 0.1, 5, "position")
    assert np.all((variances >= 0.0) & (variances <= 1.0))
    assert np.any(variances > 0.0)


def test_missing_signal(noisy_cloud):
    with pytest.raises(SignalMaskError):
        signal_variance_stats(project_signals(noisy_cloud, "p"), 0.1, 5, "color")
    with pytest.raises(RangeError):
        window_occupancy_ratios(noisy_cloud, 0.0, 5)


def test_accumulators():
    first = HistogramAccumulator(10).add([0.05, 0.55])
    second = HistogramAccumulator(10).add([0.95, 1.0])
    merged = merge_accumulators([first, second])
    assert merged.total == 4
    np.testing.assert_array_equal(merged.counts, (first + second).counts)
    histogram = merged.normalized("occupancy", 0.02, 5)
    np.testing.assert_allclose(histogram.cumulative[[0, 5, 9]], [0.25, 0.5, 1.0])
    with pytest.raises(ShapeError):
        first.merge(HistogramAccumulator(20))
    with pytest.raises(RangeError):
        HistogramAccumulator(10).add([np.nan])
    with pytest.raises(EmptyInputError):
        HistogramAccumulator(10).normalized("occupancy", 0.02, 5)


def test_average_histograms():
    low = HistogramAccumulator(4).add([0.1]).normalized("occupancy", 0.02, 5)
    high = HistogramAccumulator(4).add([0.9]).normalized("occupancy", 0.02, 5)
    average = average_histograms([low, high])
    np.testing.assert_allclose(average.cumulative, [0.5, 0.5, 0.5, 1.0])
    other = HistogramAccumulator(4).add([0.1]).normalized("color", 0.02, 5)
    with pytest.raises(ShapeError):
        average_histograms([low, other])
    with pytest.raises(EmptyInputError):
        average_histograms([])


@pytest.mark.parametrize(
    "err_source, err_target, expected",
    [(0.0, 0.0, 2.0), (0.5, 0.5, 0.0), (0.001, 0.002, 1.994), (1.0, 1.0, -2.0)],
)
def test_h_divergence(err_source, err_target, expected):
    report = h_divergence(err_source, err_target)
    assert report.d_h == pytest.approx(expected)
    assert report.worse_than_chance == (err_source + err_target > 1.0)


def test_h_divergence_accepts_numpy_numbers():
    assert h_divergence(np.float32(0.25), np.int64(0)).d_h == pytest.approx(1.5)


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan"), "0.2", None])
def test_h_divergence_rejects(bad):
    with pytest.raises(RangeError):
        h_divergence(bad, 0.1)


def test_classifier_needs_enough_crops(rng):
    with pytest.raises(DataError):
        fit_domain_classifier(rng.normal(size=(10, 4)), rng.normal(size=(30, 4)), 0)
    with pytest.raises(DataError):
        fit_domain_classifier(rng.normal(size=(30, 4)), rng.normal(size=(30, 5)), 0)


def test_identical_distributions_give_small_divergence():
    divergences = []
    for seed in range(30):
        rng = np.random.default_rng(seed)
        _, report = fit_domain_classifier(
            rng.normal(size=(300, 10)), rng.normal(size=(300, 10)), seed
        )
        divergences.append(abs(report.d_h))
    assert np.mean(divergences) < 0.3


def test_grouped_folds_hide_scene_signatures():
    # every group has its own offset; both sources draw groups alike
    divergences = []
    for seed in range(30):
        rng = np.random.default_rng(seed)

        def grouped(groups=60, crops=4):
            centers = rng.normal(scale=3.0, size=(groups, 10))
            noise = rng.normal(scale=0.1, size=(groups, crops, 10))
            return (centers[:, None] + noise).reshape(-1, 10), np.repeat(
                np.arange(groups), crops
            )

        xs, gs = grouped()
        xt, gt = grouped()
        _, report = fit_domain_classifier(xs, xt, seed, gs, gt)
        divergences.append(abs(report.d_h))
    assert np.mean(divergences) < 0.3


def test_classifier_needs_two_groups(rng):
    single = np.zeros(30, dtype=int)
    with pytest.raises(DataError):
        fit_domain_classifier(
            rng.normal(size=(30, 4)), rng.normal(size=(30, 4)), 0, single, None
        )
    with pytest.raises(DataError):
        fit_domain_classifier(
            rng.normal(size=(30, 4)), rng.normal(size=(30, 4)), 0, single[:5], None
        )


def test_same_generator_scenes_give_small_divergence():
    settings = dict(crops_per_scene=2, **CLASSIFIER_SETTINGS)
    divergences = []
    for seed in range(30):

        def scenes(offset):
            return [
                generate_noisy_volume_scene(2000, 1.0, 0.01, 0.1, seed=offset + i)
                for i in range(30)
            ]

        source, target = scenes(1000 * seed), scenes(1000 * seed + 500)
        _, report = baseline_domain_classifier(source, target, seed=seed, **settings)
        divergences.append(abs(report.d_h))
    assert np.mean(divergences) < 0.3


def planes_and_noise():
    planes = [generate_plane_scene(2.0, 0.05, level=level) for level in (0.0, 0.3)]
    noise = [generate_noisy_volume_scene(3000, 1.0, 0.01, 0.1, seed=s) for s in (1, 2)]
    return planes, noise


CLASSIFIER_SETTINGS = dict(crop_size=0.6, voxel_size=0.1, window_size=3, bins=20)


def test_planes_and_noise_are_separable():
    planes, noise = planes_and_noise()
    _, report = baseline_domain_classifier(planes, noise, seed=0, **CLASSIFIER_SETTINGS)
    assert report.d_h > 1.5


def test_classifier_is_label_symmetric():
    planes, noise = planes_and_noise()
    settings = dict(seed=4, **CLASSIFIER_SETTINGS)
    _, forward = baseline_domain_classifier(planes, noise, **settings)
    _, swapped = baseline_domain_classifier(noise, planes, **settings)
    assert swapped.err_source == forward.err_target
    assert swapped.err_target == forward.err_source
    assert swapped.d_h == forward.d_h


def test_too_few_crops():
    planes, noise = planes_and_noise()
    with pytest.raises(DataError):
        baseline_domain_classifier(
            planes[:1], noise, seed=0, crops_per_scene=10, **CLASSIFIER_SETTINGS
        )


def test_crop_features_width(noisy_cloud):
    features = crop_features(
        noisy_cloud, 0.1, 3, bins=8, features=["occupancy", "color"]
    )
    assert features.shape == (16,)
    assert features[7] == 1.0 and features[15] == 1.0
    with pytest.raises(SignalMaskError):
        crop_features(project_signals(noisy_cloud, "p"), 0.1, 3, 8, ["normal"])
