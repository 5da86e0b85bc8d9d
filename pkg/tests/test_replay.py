import json

import numpy as np
import pytest

from labtwin.engine import CameraPose, SessionState
from labtwin.errors import ValidationError
from labtwin.replay import (ReplaySession, read_log, replay_log, state_hash,
                            write_log)


def initial(scene):
    wp = scene.waypoints[0]
    return SessionState(pose=CameraPose(wp.position, wp.yaw_deg, wp.pitch_deg))


def random_entries(rng, n=120):
    entries = []
    for i in range(n):
        e = {"t": round(i * 0.1, 3), "dt": 0.1,
             "move": [float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))],
             "look": [float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3))]}
        r = rng.random()
        if r < 0.05:
            e["mode_cmd"] = "tour"
        elif r < 0.10:
            e["mode_cmd"] = "escape"
        elif r < 0.15:
            e["mode_cmd"] = f"teleport:wp{int(rng.integers(0, 22)):02d}"
        elif r < 0.20:
            e["mode_cmd"] = "free"
        if rng.random() < 0.2:
            e["interact"] = {"origin": [20.0, 50.0, 1.5],
                             "direction": [float(rng.normal()) for _ in range(3)],
                             "max_range": 40.0}
            if all(v == 0 for v in e["interact"]["direction"]):
                del e["interact"]
        entries.append(e)
    return entries


def test_state_hash_sensitivity(scene):
    a = initial(scene)
    assert state_hash(a) == state_hash(initial(scene))
    moved = SessionState(pose=CameraPose((0, 0, 1e-12), 0, 0))
    assert state_hash(a) != state_hash(moved)


def test_roundtrip_log_file(tmp_path, scene, rng):
    entries = random_entries(rng)
    path = tmp_path / "session.jsonl"
    write_log(path, entries, final_hash="abc")
    header, back = read_log(path)
    assert header == {"version": 1, "state_hash": "abc"}
    assert back == entries


def test_replay_is_deterministic(tmp_path, scene, rng):
    entries = random_entries(rng)
    path = tmp_path / "session.jsonl"
    write_log(path, entries)
    s1, h1 = replay_log(path, scene, initial(scene))
    s2, h2 = replay_log(path, scene, initial(scene))
    assert h1 == h2
    assert s1 == s2


def test_verify_pass_and_fail(tmp_path, scene, rng):
    entries = random_entries(rng, n=40)
    path = tmp_path / "session.jsonl"
    write_log(path, entries)
    _, digest = replay_log(path, scene, initial(scene))
    write_log(path, entries, final_hash=digest)
    replay_log(path, scene, initial(scene), verify=True)  # must not raise
    write_log(path, entries, final_hash="0" * 64)
    with pytest.raises(ValidationError, match="hash mismatch"):
        replay_log(path, scene, initial(scene), verify=True)


def test_verify_requires_hash(tmp_path, scene):
    path = tmp_path / "session.jsonl"
    write_log(path, [])
    with pytest.raises(ValidationError, match="no state_hash"):
        replay_log(path, scene, initial(scene), verify=True)


def test_interact_marks_viewed(scene):
    session = ReplaySession(scene, initial(scene))
    hs = scene.hotspot("eq00")
    origin = list(np.array(hs.position) + [0.0, -3.0, 0.0])
    session.apply({"interact": {"origin": origin, "direction": [0, 1, 0],
                                "max_range": 10.0}})
    assert "eq00" in session.state.viewed


def test_unknown_mode_cmd(scene):
    session = ReplaySession(scene, initial(scene))
    with pytest.raises(ValidationError):
        session.apply({"mode_cmd": "fly"})


def test_bad_log_version(tmp_path, scene):
    path = tmp_path / "session.jsonl"
    path.write_text(json.dumps({"version": 99, "state_hash": None}) + "\n")
    with pytest.raises(ValidationError, match="version"):
        read_log(path)


def test_empty_log_file(tmp_path):
    path = tmp_path / "session.jsonl"
    path.write_text("")
    with pytest.raises(ValidationError, match="empty"):
        read_log(path)
