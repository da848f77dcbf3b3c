import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hv3d.errors import BadGeometry, MissingFile, TruncatedFrame
from hv3d.video_io import (
    DepthMap, Frame, load_manifest, read_depth_sequence, read_stereo_sequence, read_yuv_sequence,
    tile_plane, untile, write_stereo_sequence, write_yuv_sequence,
)

W, H = 320, 192
FRAME_BYTES = W * H * 3 // 2


def _random_bytes(n, seed=0):
    return np.random.default_rng(seed).integers(0, 256, n, dtype=np.uint8).tobytes()


def test_single_frame(tmp_path):
    data = _random_bytes(FRAME_BYTES)
    assert len(data) == 92160
    p = tmp_path / "a.yuv"
    p.write_bytes(data)
    frames = read_yuv_sequence(p, W, H)
    assert len(frames) == 1
    assert frames[0].y[0, 0] == data[0]
    assert frames[0].u[0, 0] == data[W * H]
    assert frames[0].v[-1, -1] == data[-1]


def test_truncated(tmp_path):
    p = tmp_path / "a.yuv"
    p.write_bytes(_random_bytes(FRAME_BYTES + 1))
    with pytest.raises(TruncatedFrame):
        read_yuv_sequence(p, W, H)


def test_max_frames(tmp_path):
    p = tmp_path / "a.yuv"
    p.write_bytes(_random_bytes(FRAME_BYTES * 10))
    assert len(read_yuv_sequence(p, W, H, max_frames=4)) == 4
    assert len(read_yuv_sequence(p, W, H)) == 10


def test_missing_and_bad_geometry(tmp_path):
    with pytest.raises(MissingFile):
        read_yuv_sequence(tmp_path / "nope.yuv", W, H)
    p = tmp_path / "a.yuv"
    p.write_bytes(_random_bytes(FRAME_BYTES))
    with pytest.raises(BadGeometry):
        read_yuv_sequence(p, 321, 192)
    with pytest.raises(BadGeometry):
        read_yuv_sequence(p, 62, 192)


def test_depth_reader(tmp_path):
    p = tmp_path / "d.raw"
    p.write_bytes(_random_bytes(W * H))
    assert W * H == 61440
    assert len(read_depth_sequence(p, W, H)) == 1

    p.write_bytes(b"")
    with pytest.raises(TruncatedFrame):
        read_depth_sequence(p, W, H)

    p.write_bytes(_random_bytes(3 * W * H))
    maps = read_depth_sequence(p, W, H, max_frames=2)
    assert len(maps) == 2
    assert maps[1].d.tobytes() == p.read_bytes()[W * H:2 * W * H]


def test_yuv_round_trip_bytes(tmp_path):
    data = _random_bytes(FRAME_BYTES * 3, seed=4)
    src = tmp_path / "in.yuv"
    src.write_bytes(data)
    out = tmp_path / "out.yuv"
    write_yuv_sequence(out, read_yuv_sequence(src, W, H))
    assert out.read_bytes() == data


def test_frames_are_immutable(small_seq):
    with pytest.raises(ValueError):
        small_seq.left[0].y[0, 0] = 1


def test_frame_rejects_wrong_chroma():
    y = np.zeros((64, 64), np.uint8)
    with pytest.raises(BadGeometry):
        Frame(y, np.zeros((32, 31), np.uint8), np.zeros((32, 32), np.uint8))


@pytest.mark.parametrize("block, cols, rows", [(16, 20, 12), (64, 5, 3)])
def test_tile_counts(block, cols, rows):
    grid = tile_plane(np.zeros((192, 320), np.uint8), block)
    assert (grid.cols, grid.rows, grid.n) == (cols, rows, cols * rows)
    assert grid.blocks.shape == (cols * rows, block, block)


def test_tile_identity_block():
    p = np.arange(256, dtype=np.uint8).reshape(16, 16)
    grid = tile_plane(p, 16)
    assert grid.n == 1
    np.testing.assert_array_equal(grid.blocks[0], p)


def test_tile_row_major_order():
    p = np.arange(32 * 48).reshape(32, 48)
    grid = tile_plane(p, 16)
    np.testing.assert_array_equal(grid.blocks[1], p[0:16, 16:32])
    np.testing.assert_array_equal(grid.blocks[3], p[16:32, 0:16])


def test_tile_too_small():
    with pytest.raises(BadGeometry):
        tile_plane(np.zeros((15, 64)), 16)


@settings(max_examples=40, deadline=None)
@given(h=st.integers(16, 100), w=st.integers(16, 100), b=st.sampled_from([16, 64]), seed=st.integers(0, 2**16))
def test_tile_reassembly(h, w, b, seed):
    if h < b or w < b:
        return
    p = np.random.default_rng(seed).integers(0, 256, (h, w))
    grid = tile_plane(p, b)
    assert grid.n == (w // b) * (h // b)
    np.testing.assert_array_equal(untile(grid), p[:(h // b) * b, :(w // b) * b])


def test_manifest_round_trip(tmp_path, small_seq):
    path = write_stereo_sequence(tmp_path, small_seq, "ref")
    doc = json.loads(path.read_text())
    assert set(doc) == {"left", "right", "depth_left", "depth_right", "width", "height", "frame_count"}
    m = load_manifest(path)
    assert (m.width, m.height, m.frame_count) == (320, 192, 2)
    seq = read_stereo_sequence(path)
    for a, b in zip(seq.left + seq.right, small_seq.left + small_seq.right):
        assert a.to_bytes() == b.to_bytes()
    for a, b in zip(seq.depth_left, small_seq.depth_left):
        np.testing.assert_array_equal(a.d, b.d)


def test_manifest_errors(tmp_path, small_seq):
    with pytest.raises(MissingFile):
        load_manifest(tmp_path / "none.json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"left": "x"}))
    with pytest.raises(BadGeometry):
        load_manifest(bad)
    path = write_stereo_sequence(tmp_path, small_seq, "ref")
    (tmp_path / "ref_right.yuv").unlink()
    with pytest.raises(MissingFile):
        read_stereo_sequence(path)


def test_manifest_wants_more_frames_than_file(tmp_path, small_seq):
    path = write_stereo_sequence(tmp_path, small_seq, "ref")
    doc = json.loads(path.read_text())
    doc["frame_count"] = 5
    path.write_text(json.dumps(doc))
    with pytest.raises(TruncatedFrame):
        read_stereo_sequence(path)


def test_depth_map_geometry():
    with pytest.raises(BadGeometry):
        DepthMap(np.zeros((32, 64), np.uint8))
