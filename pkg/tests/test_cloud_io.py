import numpy as np
import pytest

from labtwin.cloud_io import (CHUNK_POINTS, PointCloud, load_cloud, read_cloud,
                              synth_cloud, write_cloud, cloud_chunks)
from labtwin.errors import ResourceError, ValidationError


def small_cloud(rng, n=500):
    pos = rng.uniform(-5, 20, size=(n, 3)).round(4)
    rgb = rng.integers(0, 256, size=(n, 3), dtype=np.uint8)
    return PointCloud.from_arrays(pos, rgb)


@pytest.mark.parametrize("fmt,suffix", [("xyzrgb-text", ".xyz"),
                                        ("internal-binary", ".bin"),
                                        ("las", ".las")])
def test_roundtrip(tmp_path, rng, fmt, suffix):
    cloud = small_cloud(rng)
    path = tmp_path / f"cloud{suffix}"
    n = write_cloud(cloud_chunks(cloud), path, fmt)
    assert n == cloud.count
    back = load_cloud(path, fmt)
    assert back.count == cloud.count
    # las stores at 1 mm scale; others are lossless for these values
    tol = 5.1e-4 if fmt == "las" else 0.0
    assert np.abs(back.positions - cloud.positions).max() <= tol
    assert np.array_equal(back.colors, cloud.colors)


def test_text_comments_and_blank_lines(tmp_path):
    path = tmp_path / "c.xyz"
    path.write_text("# header comment\n\n1 2 3 10 20 30\n# mid\n4 5 6 0 0 255\n")
    cloud = load_cloud(path, "xyzrgb-text")
    assert cloud.count == 2
    assert cloud.positions[1].tolist() == [4.0, 5.0, 6.0]
    assert cloud.colors[1].tolist() == [0, 0, 255]


def test_text_bad_line_reports_line_number(tmp_path):
    path = tmp_path / "c.xyz"
    path.write_text("1 2 3 1 2 3\nnot a point\n")
    with pytest.raises(ValidationError, match="line 2"):
        load_cloud(path, "xyzrgb-text")


def test_text_bad_color_range(tmp_path):
    path = tmp_path / "c.xyz"
    path.write_text("1 2 3 0 0 999\n")
    with pytest.raises(ValidationError):
        load_cloud(path, "xyzrgb-text")


def test_missing_file():
    with pytest.raises(ResourceError):
        read_cloud("/nonexistent/never.xyz", "xyzrgb-text")


def test_unknown_format(tmp_path):
    path = tmp_path / "c.xyz"
    path.write_text("")
    with pytest.raises(ValidationError):
        read_cloud(path, "e57")


def test_binary_magic_check(tmp_path):
    path = tmp_path / "c.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ValidationError):
        load_cloud(path, "internal-binary")


def test_write_rejects_non_finite(tmp_path):
    pos = np.array([[0.0, 0, 0], [np.nan, 1, 2]])
    rgb = np.zeros((2, 3), np.uint8)
    with pytest.raises(ValidationError, match="1"):
        write_cloud([(pos, rgb)], tmp_path / "c.bin", "internal-binary")


def test_stream_bounds_and_count(tmp_path, rng):
    cloud = small_cloud(rng, n=CHUNK_POINTS + 100)
    path = tmp_path / "c.bin"
    write_cloud(cloud_chunks(cloud), path, "internal-binary")
    stream = read_cloud(path, "internal-binary")
    with pytest.raises(RuntimeError):
        stream.bounds
    seen = sum(len(p) for p, _ in stream)
    assert seen == stream.count == cloud.count
    assert np.allclose(stream.bounds.min, cloud.positions.min(axis=0))
    assert np.allclose(stream.bounds.max, cloud.positions.max(axis=0))


def test_las_header_fields(tmp_path, rng):
    cloud = small_cloud(rng, n=64)
    path = tmp_path / "c.las"
    write_cloud(cloud_chunks(cloud), path, "las")
    head = path.read_bytes()[:227]
    assert head[:4] == b"LASF"
    assert head[24:26] == b"\x01\x02"  # version 1.2


def test_synth_room_stays_in_envelope():
    cloud = synth_cloud("room-with-aisles", 20_000, seed=1)
    assert cloud.count == 20_000
    assert (cloud.positions >= -1e-9).all()
    assert (cloud.positions <= np.array([40.0, 100.0, 6.0]) + 1e-9).all()


def test_synth_deterministic():
    a = synth_cloud("box", 1000, seed=42)
    b = synth_cloud("box", 1000, seed=42)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.colors, b.colors)


def test_synth_unknown_shape():
    with pytest.raises(ValidationError):
        synth_cloud("torus", 10, seed=0)
