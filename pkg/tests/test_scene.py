import json

import pytest

from labtwin.errors import ResourceError, ValidationError
from labtwin.geometry import Aabb
from labtwin.scene import (demo_scene, load_scene, save_scene, scene_from_json,
                           scene_to_json, validate_scene)

import numpy as np


def test_demo_scene_shape():
    scene = demo_scene()
    assert len(scene.waypoints) == 22
    counts = scene.category_counts()
    assert counts["info"] == 51
    assert counts["fire_extinguisher"] == 6
    assert counts["first_aid"] == 3
    assert counts["hs_notice"] == 4
    assert len(scene.exits) == 2
    assert scene.tour is not None
    assert len(scene.tour.waypoint_ids) == 22


def test_save_load_byte_stable(tmp_path):
    scene = demo_scene()
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    save_scene(scene, p1)
    save_scene(load_scene(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_missing_key():
    doc = scene_to_json(demo_scene())
    del doc["exits"]
    with pytest.raises(ValidationError, match="exits"):
        scene_from_json(doc)


def test_bad_version():
    doc = scene_to_json(demo_scene())
    doc["version"] = 2
    with pytest.raises(ValidationError, match="version"):
        scene_from_json(doc)


def test_duplicate_id_across_kinds():
    doc = scene_to_json(demo_scene())
    doc["hotspots"][0]["id"] = doc["waypoints"][0]["id"]
    with pytest.raises(ValidationError, match="duplicate id"):
        scene_from_json(doc)


def test_unknown_category():
    doc = scene_to_json(demo_scene())
    doc["hotspots"][0]["category"] = "coffee"
    with pytest.raises(ValidationError, match="category"):
        scene_from_json(doc)


def test_tour_dangling_reference():
    doc = scene_to_json(demo_scene())
    doc["tour"]["waypoint_ids"][0] = "ghost"
    with pytest.raises(ValidationError, match="ghost"):
        scene_from_json(doc)


def test_tour_out_of_sequence():
    doc = scene_to_json(demo_scene())
    ids = doc["tour"]["waypoint_ids"]
    ids[0], ids[1] = ids[1], ids[0]
    with pytest.raises(ValidationError, match="sequence"):
        scene_from_json(doc)


def test_non_finite_position():
    doc = scene_to_json(demo_scene())
    doc["waypoints"][0]["position"] = [0.0, 1e400, 0.0]
    with pytest.raises(Exception):
        scene_from_json(doc)


def test_tour_may_be_null():
    doc = scene_to_json(demo_scene())
    doc["tour"] = None
    scene = scene_from_json(doc)
    assert scene.tour is None


def test_validate_warns_outside_bounds():
    scene = demo_scene()
    tiny = Aabb(np.zeros(3), np.ones(3))
    rep = validate_scene(scene, tiny)
    assert rep.ok  # warnings only
    assert any("outside dataset bounds" in w for w in rep.warnings)


def test_validate_in_bounds_no_warning():
    scene = demo_scene()
    rep = validate_scene(scene, Aabb(np.zeros(3), np.array([40.0, 100, 6])))
    assert not any("outside" in w for w in rep.warnings)


def test_load_missing_file(tmp_path):
    with pytest.raises(ResourceError):
        load_scene(tmp_path / "nope.json")


def test_load_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError, match="invalid JSON"):
        load_scene(p)


def test_default_trigger_radius():
    doc = scene_to_json(demo_scene())
    del doc["hotspots"][0]["trigger_radius"]
    scene = scene_from_json(doc)
    assert scene.hotspots[0].trigger_radius == 0.75


def test_canonical_file_ends_with_newline(tmp_path):
    p = tmp_path / "s.json"
    save_scene(demo_scene(), p)
    raw = p.read_bytes()
    assert raw.endswith(b"\n")
    json.loads(raw)  # still valid JSON
