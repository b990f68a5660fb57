import numpy as np
import pytest

from errors import DataError, MaskError, ParseError
from scene_io import (
    FULL_MASK,
    PlyFormat,
    PointCloud,
    Signal,
    generate_noisy_volume_scene,
    generate_plane_scene,
    load_pointcloud,
    mask_code,
    parse_mask,
    save_pointcloud,
)


def test_parse_mask_accepts_codes_and_names():
    assert parse_mask("pcn") == FULL_MASK
    assert parse_mask("p,n") == {Signal.POSITION, Signal.NORMAL}
    assert parse_mask(["position", "color"]) == {Signal.POSITION, Signal.COLOR}
    assert mask_code(parse_mask("np")) == "pn"
    with pytest.raises(MaskError):
        parse_mask("px")


def test_signal_mask_follows_present_arrays():
    pc = PointCloud(np.zeros((2, 3)), colors=np.full((2, 3), 0.5))
    assert pc.signal_mask == {Signal.POSITION, Signal.COLOR}
    with pytest.raises(MaskError):
        pc.signal(Signal.NORMAL)


def test_point_cloud_rejects_invalid_signals():
    with pytest.raises(DataError):
        PointCloud(np.array([[0.0, np.nan, 0.0]]))
    with pytest.raises(DataError):
        PointCloud(np.zeros((1, 3)), colors=np.array([[1.5, 0.0, 0.0]]))
    with pytest.raises(DataError):
        PointCloud(np.zeros((1, 3)), normals=np.array([[0.0, 0.0, 2.0]]))


def test_arrays_are_read_only():
    pc = PointCloud(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pc.positions[0, 0] = 1.0


@pytest.mark.parametrize("fmt", list(PlyFormat))
def test_ply_round_trip(tmp_path, fmt):
    pc = generate_plane_scene(0.2, 0.05)
    path = save_pointcloud(pc, tmp_path / "plane.ply", fmt)
    loaded = load_pointcloud(path)
    np.testing.assert_array_equal(loaded.positions, pc.positions)
    np.testing.assert_array_equal(loaded.colors, pc.colors)
    np.testing.assert_array_equal(loaded.normals, pc.normals)


def test_ply_positions_only(tmp_path):
    pc = PointCloud(np.array([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]]))
    loaded = load_pointcloud(save_pointcloud(pc, tmp_path / "p.ply", PlyFormat.ASCII))
    assert loaded.signal_mask == {Signal.POSITION}
    assert loaded == pc


def test_ply_format_mismatch(tmp_path):
    path = save_pointcloud(generate_plane_scene(0.1, 0.05), tmp_path / "a.ply")
    with pytest.raises(ParseError):
        load_pointcloud(path, PlyFormat.ASCII)


def test_ply_reports_bad_row(tmp_path):
    path = tmp_path / "bad.ply"
    path.write_text(
        "ply\nformat ascii 1.0\nelement vertex 2\n"
        "property double x\nproperty double y\nproperty double z\nend_header\n"
        "0 0 0\n1 oops 1\n"
    )
    with pytest.raises(ParseError) as info:
        load_pointcloud(path)
    assert "row 1" in str(info.value)
    assert "'y'" in str(info.value)


def test_ply_reports_bad_header_line(tmp_path):
    path = tmp_path / "header.ply"
    path.write_text(
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\n"
        "bogus keyword\nend_header\n0\n"
    )
    with pytest.raises(ParseError) as info:
        load_pointcloud(path)
    assert info.value.line is not None
    assert str(info.value).startswith(f"line {info.value.line}: ")


def test_ply_rejects_non_ply_file(tmp_path):
    path = tmp_path / "not.ply"
    path.write_text("solid cube\nendsolid\n")
    with pytest.raises(ParseError):
        load_pointcloud(path)


def test_ply_ignores_face_element(tmp_path):
    path = tmp_path / "mesh.ply"
    path.write_text(
        "ply\nformat ascii 1.0\nelement vertex 3\n"
        "property float x\nproperty float y\nproperty float z\n"
        "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
        "0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"
    )
    loaded = load_pointcloud(path)
    assert len(loaded) == 3
    assert loaded.signal_mask == {Signal.POSITION}


def test_ply_rejects_partial_color_group(tmp_path):
    path = tmp_path / "partial.ply"
    path.write_text(
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\n"
        "property double y\nproperty double z\nproperty uchar red\nend_header\n"
        "0 0 0 255\n"
    )
    with pytest.raises(ParseError):
        load_pointcloud(path)


def test_ply_truncated_binary(tmp_path):
    path = save_pointcloud(generate_plane_scene(0.1, 0.05), tmp_path / "t.ply")
    data = path.read_bytes()
    path.write_bytes(data[:-3])
    with pytest.raises(ParseError):
        load_pointcloud(path)


def test_plane_scene_layout():
    pc = generate_plane_scene(0.98, 0.02)
    assert len(pc) == 50 * 50
    assert np.all(pc.positions[:, 2] == 0.0)
    assert np.all(pc.normals == [0.0, 0.0, 1.0])
    with pytest.raises(DataError):
        generate_plane_scene(1.0, 0.1, axis="w")


def test_noisy_volume_is_seeded():
    a = generate_noisy_volume_scene(100, 1.0, 0.01, 0.1, seed=3)
    b = generate_noisy_volume_scene(100, 1.0, 0.01, 0.1, seed=3)
    c = generate_noisy_volume_scene(100, 1.0, 0.01, 0.1, seed=4)
    assert a == b
    assert a != c
    assert np.all((a.positions >= 0.0) & (a.positions <= 1.0))


def test_plane_scene_grid_and_span():
    pc = generate_plane_scene(1.0, 0.02)
    assert len(pc) == 51 * 51
    for axis in (0, 1):
        assert pc.positions[:, axis].min() == pytest.approx(0.01)
        assert pc.positions[:, axis].max() == pytest.approx(1.01)


@pytest.mark.parametrize("variance", [0.005, 0.01, 0.02])
def test_noisy_volume_color_variance_matches_request(variance):
    pc = generate_noisy_volume_scene(20000, 1.0, variance, 0.1, seed=8)
    measured = pc.colors.var(axis=0)
    assert np.all(np.abs(measured - variance) <= 0.2 * variance)


def test_noisy_volume_without_color_variance():
    pc = generate_noisy_volume_scene(1000, 1.0, 0.0, 0.1, seed=8)
    assert np.all(pc.colors == 0.5)
