import numpy as np
import pytest

from errors import EmptyInputError, RangeError
from scene_io import PointCloud
from voxels import (
    build_hierarchy,
    coarsen,
    knn_neighbors,
    knn_pool_downsample,
    parent_indices,
    partition_windows,
    voxelize,
    window_coords,
)


def test_voxelize_keeps_point_nearest_center():
    pc = PointCloud(
        np.array([[0.01, 0.01, 0.01], [0.05, 0.05, 0.05], [0.35, 0.0, 0.0]])
    )
    grid = voxelize(pc, 0.1)
    np.testing.assert_array_equal(grid.coords, [[0, 0, 0], [3, 0, 0]])
    np.testing.assert_array_equal(grid.points.positions[0], [0.05, 0.05, 0.05])
    assert grid.index_of((3, 0, 0)) == 1
    with pytest.raises(KeyError):
        grid.index_of((1, 1, 1))


def test_voxelize_rejects_bad_input():
    with pytest.raises(EmptyInputError):
        voxelize(PointCloud(np.zeros((0, 3))), 0.1)
    with pytest.raises(RangeError):
        voxelize(PointCloud(np.zeros((1, 3))), 0.0)


def test_offsets_lie_within_half_voxel(noisy_cloud):
    grid = voxelize(noisy_cloud, 0.05)
    assert np.all(np.abs(grid.offsets()) <= 0.5 + 1e-9)


def test_hierarchy_occupancy_never_grows(noisy_cloud):
    hierarchy = build_hierarchy(voxelize(noisy_cloud, 0.05), 5)
    sizes = [len(g) for g in hierarchy]
    assert len(sizes) == 5
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    assert [g.level for g in hierarchy] == [0, 1, 2, 3, 4]
    assert hierarchy[4].voxel_size == pytest.approx(0.8)


def test_coarsen_parent_coordinates():
    pc = PointCloud(
        np.array([[0.05, 0.05, 0.05], [0.15, 0.05, 0.05], [0.25, 0.05, 0.05]])
    )
    coarse = coarsen(voxelize(pc, 0.1))
    np.testing.assert_array_equal(coarse.coords, [[0, 0, 0], [1, 0, 0]])


def test_partition_covers_every_cell_once(noisy_cloud):
    grid = voxelize(noisy_cloud, 0.05)
    for shifted in (False, True):
        partition = partition_windows(grid, 5, shifted)
        members = np.concatenate([w.members for w in partition.windows])
        assert sorted(members.tolist()) == list(range(len(grid)))
        keys = window_coords(grid.coords, 5, shifted)
        for window in partition.windows:
            assert np.all(keys[window.members] == window.coord)


def test_shifted_windows_move_by_half_window():
    np.testing.assert_array_equal(window_coords([[2, 0, 0]], 5, False), [[0, 0, 0]])
    np.testing.assert_array_equal(window_coords([[3, 0, 0]], 5, True), [[1, 0, 0]])
    np.testing.assert_array_equal(window_coords([[-3, 0, 0]], 5, True), [[-1, 0, 0]])


def test_occupancy_ratios_single_voxel():
    grid = voxelize(PointCloud(np.array([[0.01, 0.01, 0.01]])), 0.02)
    np.testing.assert_allclose(partition_windows(grid, 5).occupancy_ratios(), [1 / 125])


def test_knn_pool_takes_componentwise_max():
    fine_pc = PointCloud(
        np.array([[0.05, 0.05, 0.05], [0.15, 0.05, 0.05], [0.95, 0.95, 0.95]])
    )
    fine = voxelize(fine_pc, 0.1)
    coarse = coarsen(fine)
    features = np.array([[1.0, -2.0], [-1.0, 3.0], [7.0, 7.0]])
    pooled = knn_pool_downsample(features, fine, coarse, k=2)
    assert pooled.shape == (len(coarse), 2)
    np.testing.assert_array_equal(pooled[0], [1.0, 3.0])


def test_knn_clamps_k_to_fine_count():
    fine = voxelize(PointCloud(np.array([[0.05, 0.05, 0.05]])), 0.1)
    assert knn_neighbors(fine, coarsen(fine), 16).shape == (1, 1)
    with pytest.raises(RangeError):
        knn_neighbors(fine, coarsen(fine), 0)


def test_voxelize_ignores_point_order(noisy_cloud):
    grid = voxelize(noisy_cloud, 0.05)
    order = np.random.default_rng(5).permutation(len(noisy_cloud))
    shuffled = voxelize(noisy_cloud.take(order), 0.05)
    np.testing.assert_array_equal(shuffled.coords, grid.coords)
    np.testing.assert_array_equal(shuffled.points.positions, grid.points.positions)
    np.testing.assert_array_equal(shuffled.points.colors, grid.points.colors)


def test_knn_pool_single_child_keeps_its_feature():
    fine = voxelize(
        PointCloud(np.array([[0.05, 0.05, 0.05], [0.25, 0.05, 0.05]])), 0.1
    )
    coarse = coarsen(fine)
    features = np.array([[1.0, 0.0], [0.0, 5.0]])
    pooled = knn_pool_downsample(features, fine, coarse, k=16)
    np.testing.assert_array_equal(pooled, features)


def test_knn_pool_over_eight_children():
    corners = np.array(
        [[x, y, z] for x in (0.05, 0.15) for y in (0.05, 0.15) for z in (0.05, 0.15)]
    )
    fine = voxelize(PointCloud(corners), 0.1)
    coarse = coarsen(fine)
    assert len(fine) == 8
    assert len(coarse) == 1
    features = np.eye(8)

    np.testing.assert_array_equal(
        knn_pool_downsample(features, fine, coarse, k=16), np.ones((1, 8))
    )
    # all children are equidistant, so K=1 keeps the representative child
    nearest = knn_pool_downsample(features, fine, coarse, k=1)
    representative = np.flatnonzero(
        np.all(fine.points.positions == coarse.points.positions[0], axis=1)
    )[0]
    np.testing.assert_array_equal(nearest[0], features[representative])


def test_knn_single_neighbor_matches_exhaustive_search(noisy_cloud):
    fine = voxelize(noisy_cloud, 0.05)
    coarse = coarsen(fine)
    neighbors = knn_neighbors(fine, coarse, 1)
    assert neighbors.shape == (len(coarse), 1)

    parents = np.floor_divide(fine.coords, 2)
    for i, coord in enumerate(coarse.coords):
        children = np.flatnonzero(np.all(parents == coord, axis=1))
        distance = np.sum(
            (fine.points.positions[children] - coarse.points.positions[i]) ** 2,
            axis=1,
        )
        assert neighbors[i, 0] == children[np.argmin(distance)]


def test_knn_candidates_are_children_only(noisy_cloud):
    fine = voxelize(noisy_cloud, 0.05)
    coarse = coarsen(fine)
    parent = parent_indices(fine, coarse)
    assert np.all(parent >= 0)
    neighbors = knn_neighbors(fine, coarse, 4)
    assert neighbors.shape[1] == min(4, np.bincount(parent).max())
    for i, row in enumerate(neighbors):
        assert np.all(parent[row] == i)
