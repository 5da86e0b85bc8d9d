import numpy as np
import pytest

from labtwin.errors import ValidationError
from labtwin.path import build_path, build_tour_path
from labtwin.scene import Waypoint, demo_scene

from .oracles import dense_arc_length


def wp(i, x, y, z=0.0, yaw=0.0, pitch=0.0):
    return Waypoint(id=f"w{i}", name=f"W{i}", position=(x, y, z),
                    yaw_deg=yaw, pitch_deg=pitch, sequence=i)


def test_passes_through_waypoints():
    path = build_tour_path(demo_scene())
    for i, arc in enumerate(path.waypoint_arcs):
        pos, _, _ = path.sample(float(arc))
        assert np.linalg.norm(pos - path.controls[i]) < 1e-6


def test_straight_line_length():
    path = build_path([wp(0, 0, 0), wp(1, 10, 0)])
    assert path.total_length == pytest.approx(10.0, abs=1e-9)
    pos, _, _ = path.sample(2.5)
    assert np.allclose(pos, [2.5, 0, 0], atol=1e-9)


def test_arc_length_matches_dense_integration():
    path = build_path([wp(0, 0, 0), wp(1, 4, 3), wp(2, 8, -1), wp(3, 12, 5)])
    ref = dense_arc_length(path, segments=300_000)
    assert path.total_length == pytest.approx(ref, abs=5e-3)


def test_sample_clamps():
    path = build_path([wp(0, 0, 0), wp(1, 5, 0)])
    lo, _, _ = path.sample(-3.0)
    hi, _, _ = path.sample(path.total_length + 3.0)
    assert np.allclose(lo, [0, 0, 0])
    assert np.allclose(hi, [5, 0, 0])


def test_constant_speed_parameterization():
    path = build_path([wp(0, 0, 0), wp(1, 3, 4), wp(2, 9, 2)])
    ds = path.total_length / 200
    prev, _, _ = path.sample(0.0)
    for k in range(1, 201):
        cur, _, _ = path.sample(k * ds)
        step = np.linalg.norm(cur - prev)
        assert step <= ds + 1e-9  # chords never exceed arc
        assert step >= 0.97 * ds  # and stay within flattening tolerance
        prev = cur


def test_yaw_interpolates_shortest_way():
    path = build_path([wp(0, 0, 0, yaw=350.0), wp(1, 10, 0, yaw=10.0)])
    _, yaw, _ = path.sample(path.total_length / 2)
    assert yaw == pytest.approx(0.0, abs=1.0) or yaw == pytest.approx(360.0, abs=1.0)


def test_pitch_interpolates_linearly():
    path = build_path([wp(0, 0, 0, pitch=-10.0), wp(1, 10, 0, pitch=30.0)])
    _, _, pitch = path.sample(path.total_length / 2)
    assert pitch == pytest.approx(10.0, abs=1.0)


def test_coincident_waypoints_do_not_crash():
    path = build_path([wp(0, 0, 0), wp(1, 0, 0), wp(2, 5, 0)])
    assert path.total_length == pytest.approx(5.0, rel=0.05)
    pos, _, _ = path.sample(path.total_length)
    assert np.allclose(pos, [5, 0, 0], atol=1e-6)


def test_needs_two_waypoints():
    with pytest.raises(ValidationError):
        build_path([wp(0, 0, 0)])


def test_monotone_lookup():
    path = build_tour_path(demo_scene())
    arcs = np.linspace(0, path.total_length, 500)
    xs = np.array([path.sample(s)[0] for s in arcs])
    steps = np.linalg.norm(np.diff(xs, axis=0), axis=1)
    assert (steps >= 0).all()
    assert steps.max() <= (arcs[1] - arcs[0]) + 1e-9
