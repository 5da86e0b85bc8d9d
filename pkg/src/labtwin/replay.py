"""Deterministic session logs: JSON-lines input recording and replay.

Line 1 is a header ``{"version": 1, "state_hash": ...}``; each following
line is one input frame ``{t, dt, move: [2], look: [2], mode_cmd?,
interact?, paused?}``. ``mode_cmd`` is "free", "tour", "escape", or
"teleport:<waypoint_id>"; ``interact`` is a pick ray
``{origin: [3], direction: [3], max_range}``.

The state hash covers every engine-visible field, with floats rendered via
``float.hex`` so equal trajectories hash identically across platforms of
the same endianness.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Optional

from .engine import (KinematicsConfig, SessionState, mark_viewed, pick_hotspot,
                     start_escape, start_tour, step_escape, step_free,
                     step_tour, teleport)
from .errors import ValidationError
from .path import TourPath, build_tour_path
from .scene import SceneDefinition

LOG_VERSION = 1


def state_hash(state: SessionState) -> str:
    def fx(v: float) -> str:
        return float(v).hex()

    payload = {
        "position": [fx(v) for v in state.pose.position],
        "yaw": fx(state.pose.yaw_deg),
        "pitch": fx(state.pose.pitch_deg),
        "mode": state.mode,
        "tour_progress": fx(state.tour_progress),
        "viewed": sorted(state.viewed),
        "clock": fx(state.clock),
        "guidance": None if state.guidance is None else {
            "exit_id": state.guidance.exit_id,
            "bearing": fx(state.guidance.bearing_deg),
            "relative": fx(state.guidance.relative_bearing_deg),
            "distance": fx(state.guidance.distance_m),
            "arrived": state.guidance.arrived,
        },
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def write_log(path, entries: Iterable[dict],
              final_hash: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"version": LOG_VERSION, "state_hash": final_hash})
                 + "\n")
        for e in entries:
            fh.write(json.dumps(e, separators=(",", ":")) + "\n")


def read_log(path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValidationError(f"{path}: empty log")
    header = json.loads(lines[0])
    if header.get("version") != LOG_VERSION:
        raise ValidationError(f"{path}: unsupported log version")
    return header, [json.loads(ln) for ln in lines[1:] if ln.strip()]


class ReplaySession:
    """Applies input frames to an engine state."""

    def __init__(self, scene: SceneDefinition, state: SessionState,
                 cfg: Optional[KinematicsConfig] = None):
        self.scene = scene
        self.cfg = cfg or KinematicsConfig()
        self.state = state
        self._path: Optional[TourPath] = None

    @property
    def path(self) -> TourPath:
        if self._path is None:
            self._path = build_tour_path(self.scene)
        return self._path

    def apply(self, entry: dict) -> None:
        cmd = entry.get("mode_cmd")
        if cmd:
            if cmd == "free":
                self.state = replace(self.state, mode="free", guidance=None)
            elif cmd == "tour":
                self.state = start_tour(self.state, self.path)
            elif cmd == "escape":
                self.state = start_escape(self.state, self.scene)
            elif cmd.startswith("teleport:"):
                self.state = teleport(self.state, self.scene,
                                      cmd.split(":", 1)[1])
            else:
                raise ValidationError(f"unknown mode_cmd {cmd!r}")
        dt = float(entry.get("dt", 0.0))
        move = entry.get("move", [0.0, 0.0])
        look = entry.get("look", [0.0, 0.0])
        if dt > 0:
            if self.state.mode == "free":
                self.state = step_free(self.state, move, look, dt, self.cfg)
            elif self.state.mode == "tour":
                speed = self.scene.tour.speed_mps if self.scene.tour else 1.0
                self.state = step_tour(self.state, dt, self.path, speed,
                                       paused=bool(entry.get("paused")))
            elif self.state.mode == "escape":
                self.state, _ = step_escape(self.state, move, look, dt,
                                            self.cfg, self.scene)
        ray = entry.get("interact")
        if ray:
            hit = pick_hotspot(self.scene, ray["origin"], ray["direction"],
                               float(ray.get("max_range", 25.0)))
            if hit is not None:
                self.state, _ = mark_viewed(self.state, self.scene, hit)


def replay_log(path, scene: SceneDefinition, initial: SessionState,
               cfg: Optional[KinematicsConfig] = None,
               verify: bool = False) -> tuple[SessionState, str]:
    header, entries = read_log(path)
    session = ReplaySession(scene, initial, cfg)
    for entry in entries:
        session.apply(entry)
    digest = state_hash(session.state)
    if verify:
        expected = header.get("state_hash")
        if expected is None:
            raise ValidationError(f"{path}: log header carries no state_hash")
        if expected != digest:
            raise ValidationError(
                f"{path}: state hash mismatch (expected {expected}, got {digest})")
    return session.state, digest
