"""Authored interaction layer: waypoints, tour, hotspots, exits.

One JSON interchange file carries the whole layer; loading validates every
invariant with errors that name the offending id or field. Saved output is
canonical, so a load/save cycle is byte-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ResourceError, ValidationError
from .geometry import Aabb

HOTSPOT_CATEGORIES = ("info", "fire_extinguisher", "first_aid", "hs_notice")
DEFAULT_TRIGGER_RADIUS = 0.75
TOUR_LEG_WARN_METERS = 50.0


@dataclass(frozen=True)
class Waypoint:
    id: str
    name: str
    position: tuple[float, float, float]
    yaw_deg: float
    pitch_deg: float
    sequence: int


@dataclass(frozen=True)
class Hotspot:
    id: str
    category: str
    position: tuple[float, float, float]
    trigger_radius: float
    title: str
    body: str
    image_ref: Optional[str] = None


@dataclass(frozen=True)
class ExitPoint:
    id: str
    name: str
    position: tuple[float, float, float]


@dataclass(frozen=True)
class TourSpec:
    waypoint_ids: tuple[str, ...]
    speed_mps: float


@dataclass(frozen=True)
class SceneDefinition:
    version: int
    waypoints: tuple[Waypoint, ...]
    tour: Optional[TourSpec]
    hotspots: tuple[Hotspot, ...]
    exits: tuple[ExitPoint, ...]

    def waypoint(self, wp_id: str) -> Waypoint:
        for wp in self.waypoints:
            if wp.id == wp_id:
                return wp
        raise ValidationError(f"unknown waypoint {wp_id!r}")

    def hotspot(self, hs_id: str) -> Hotspot:
        for hs in self.hotspots:
            if hs.id == hs_id:
                return hs
        raise ValidationError(f"unknown hotspot {hs_id!r}")

    def category_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in HOTSPOT_CATEGORIES}
        for hs in self.hotspots:
            counts[hs.category] += 1
        return counts


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def _position(obj, what: str) -> tuple[float, float, float]:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 3
            or not all(isinstance(v, (int, float)) for v in obj)):
        raise ValidationError(f"{what}: position must be a length-3 number array")
    p = tuple(float(v) for v in obj)
    if not all(math.isfinite(v) for v in p):
        raise ValidationError(f"{what}: non-finite coordinate")
    return p


def load_scene(path) -> SceneDefinition:
    path = Path(path)
    if not path.exists():
        raise ResourceError(f"{path}: no such file")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
    return scene_from_json(raw)


def scene_from_json(raw: dict) -> SceneDefinition:
    if not isinstance(raw, dict):
        raise ValidationError("scene root must be an object")
    for key in ("version", "waypoints", "tour", "hotspots", "exits"):
        if key not in raw:
            raise ValidationError(f"scene missing required key {key!r}")
    if raw["version"] != 1:
        raise ValidationError(f"unsupported scene version {raw['version']!r}")

    waypoints = []
    for w in raw["waypoints"]:
        waypoints.append(Waypoint(
            id=str(w["id"]), name=str(w["name"]),
            position=_position(w["position"], f"waypoint {w.get('id')!r}"),
            yaw_deg=float(w["yaw_deg"]), pitch_deg=float(w["pitch_deg"]),
            sequence=int(w["sequence"]),
        ))
    hotspots = []
    for h in raw["hotspots"]:
        hotspots.append(Hotspot(
            id=str(h["id"]), category=str(h["category"]),
            position=_position(h["position"], f"hotspot {h.get('id')!r}"),
            trigger_radius=float(h.get("trigger_radius", DEFAULT_TRIGGER_RADIUS)),
            title=str(h["title"]), body=str(h["body"]),
            image_ref=h.get("image_ref"),
        ))
    exits = []
    for e in raw["exits"]:
        exits.append(ExitPoint(
            id=str(e["id"]), name=str(e["name"]),
            position=_position(e["position"], f"exit {e.get('id')!r}"),
        ))
    tour = None
    if raw["tour"] is not None:
        t = raw["tour"]
        tour = TourSpec(waypoint_ids=tuple(str(i) for i in t["waypoint_ids"]),
                        speed_mps=float(t["speed_mps"]))
    scene = SceneDefinition(
        version=1, waypoints=tuple(waypoints), tour=tour,
        hotspots=tuple(hotspots), exits=tuple(exits),
    )
    report = _check_invariants(scene)
    if report.errors:
        raise ValidationError("; ".join(report.errors))
    return scene


def _check_invariants(scene: SceneDefinition) -> ValidationReport:
    rep = ValidationReport()
    seen: dict[str, str] = {}
    for kind, items in (("waypoint", scene.waypoints),
                        ("hotspot", scene.hotspots),
                        ("exit", scene.exits)):
        for it in items:
            if it.id in seen:
                rep.errors.append(
                    f"duplicate id {it.id!r} ({seen[it.id]} vs {kind})")
            else:
                seen[it.id] = kind
    for wp in scene.waypoints:
        if not -89.0 <= wp.pitch_deg <= 89.0:
            rep.errors.append(f"waypoint {wp.id!r}: pitch {wp.pitch_deg} outside [-89, 89]")
        if wp.sequence < 0:
            rep.errors.append(f"waypoint {wp.id!r}: negative sequence")
    for hs in scene.hotspots:
        if hs.category not in HOTSPOT_CATEGORIES:
            rep.errors.append(f"hotspot {hs.id!r}: unknown category {hs.category!r}")
        if not hs.trigger_radius > 0:
            rep.errors.append(f"hotspot {hs.id!r}: trigger_radius must be > 0")
    if scene.tour is not None:
        by_id = {wp.id: wp for wp in scene.waypoints}
        members = []
        for wid in scene.tour.waypoint_ids:
            wp = by_id.get(wid)
            if wp is None:
                rep.errors.append(f"tour references unknown waypoint {wid!r}")
            else:
                members.append(wp)
        seqs = [wp.sequence for wp in members]
        if len(set(seqs)) != len(seqs):
            rep.errors.append("tour waypoints have duplicate sequence values")
        elif seqs != sorted(seqs):
            rep.errors.append("tour order does not match waypoint sequence fields")
        if not scene.tour.speed_mps > 0:
            rep.errors.append("tour speed_mps must be > 0")
    return rep


def scene_to_json(scene: SceneDefinition) -> dict:
    def pos(p):
        return [float(v) for v in p]

    tour = None
    if scene.tour is not None:
        tour = {"waypoint_ids": list(scene.tour.waypoint_ids),
                "speed_mps": scene.tour.speed_mps}
    return {
        "version": scene.version,
        "waypoints": [
            {"id": w.id, "name": w.name, "position": pos(w.position),
             "yaw_deg": w.yaw_deg, "pitch_deg": w.pitch_deg,
             "sequence": w.sequence}
            for w in scene.waypoints
        ],
        "tour": tour,
        "hotspots": [
            {"id": h.id, "category": h.category, "position": pos(h.position),
             "trigger_radius": h.trigger_radius, "title": h.title,
             "body": h.body,
             **({"image_ref": h.image_ref} if h.image_ref is not None else {})}
            for h in scene.hotspots
        ],
        "exits": [
            {"id": e.id, "name": e.name, "position": pos(e.position)}
            for e in scene.exits
        ],
    }


def save_scene(scene: SceneDefinition, path) -> None:
    data = json.dumps(scene_to_json(scene), ensure_ascii=False, indent=2)
    try:
        Path(path).write_text(data + "\n", encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"{path}: {exc}") from exc


def validate_scene(scene: SceneDefinition,
                   dataset_bounds: Optional[Aabb] = None) -> ValidationReport:
    """Authoring lint: invariant errors plus advisory warnings. Never raises."""
    rep = _check_invariants(scene)
    if dataset_bounds is not None:
        everything = ([(w.id, w.position) for w in scene.waypoints]
                      + [(h.id, h.position) for h in scene.hotspots]
                      + [(e.id, e.position) for e in scene.exits])
        for oid, p in everything:
            if not dataset_bounds.contains(p):
                rep.warnings.append(f"{oid!r}: position outside dataset bounds")
    for i, a in enumerate(scene.hotspots):
        for b in scene.hotspots[i + 1:]:
            d = math.dist(a.position, b.position)
            if d < a.trigger_radius + b.trigger_radius:
                rep.warnings.append(
                    f"hotspots {a.id!r} and {b.id!r}: trigger spheres overlap")
    if scene.tour is not None and len(scene.tour.waypoint_ids) >= 2:
        try:
            wps = [scene.waypoint(i) for i in scene.tour.waypoint_ids]
            for a, b in zip(wps, wps[1:]):
                if math.dist(a.position, b.position) > TOUR_LEG_WARN_METERS:
                    rep.warnings.append(
                        f"tour leg {a.id!r} -> {b.id!r} longer than "
                        f"{TOUR_LEG_WARN_METERS:g} m")
        except ValidationError:
            pass  # dangling references already reported as errors
    return rep


# --- bundled demo scene -----------------------------------------------------

def demo_scene() -> SceneDefinition:
    """Desk-scale lab layout: 22 waypoints, 51 info hotspots, safety layers.

    Matches the synthetic room (40 x 100 x 6 m): waypoints follow the two
    aisles, info hotspots sit on the equipment blocks, exits at both end
    doors.
    """
    eye = 1.7
    waypoints = []
    # serpentine route: up the west aisle, across, back down the east aisle
    stations = []
    for i in range(11):
        stations.append((3.0, 5.0 + i * 9.0))
    for i in range(11):
        stations.append((21.0, 95.0 - i * 9.0))
    for i, (x, y) in enumerate(stations):
        nxt = stations[min(i + 1, len(stations) - 1)]
        prv = stations[max(i - 1, 0)]
        yaw = math.degrees(math.atan2(nxt[0] - prv[0], nxt[1] - prv[1])) % 360.0
        waypoints.append(Waypoint(
            id=f"wp{i:02d}", name=f"Station {i + 1}",
            position=(x, y, eye), yaw_deg=round(yaw, 3), pitch_deg=0.0,
            sequence=i,
        ))

    hotspots = []
    titles = ["Hydraulic bench", "Temperature control rig", "500T testing system",
              "Materials tester", "Flow channel", "Wind tunnel", "Pump station",
              "Control cabinet", "Sample oven"]
    k = 0
    for col, x in ((0, 5.5), (1, 35.0)):
        for row in range(8):
            y0 = 6.0 + row * 12.0
            for j in range(4):
                if k >= 51:
                    break
                hotspots.append(Hotspot(
                    id=f"eq{k:02d}", category="info",
                    position=(x, y0 + 1.0 + j * 1.8, 1.2),
                    trigger_radius=DEFAULT_TRIGGER_RADIUS,
                    title=f"{titles[k % len(titles)]} #{k + 1}",
                    body=f"Operating notes for unit {k + 1}.",
                    image_ref=f"eq/unit{k + 1}.jpg",
                ))
                k += 1
    for i in range(6):
        hotspots.append(Hotspot(
            id=f"fire{i}", category="fire_extinguisher",
            position=(1.0 if i % 2 == 0 else 39.0, 10.0 + i * 16.0, 1.0),
            trigger_radius=DEFAULT_TRIGGER_RADIUS,
            title=f"Fire extinguisher {i + 1}", body="CO2 extinguisher, 5 kg."))
    for i in range(3):
        hotspots.append(Hotspot(
            id=f"aid{i}", category="first_aid",
            position=(20.0, 20.0 + i * 30.0, 1.4),
            trigger_radius=DEFAULT_TRIGGER_RADIUS,
            title=f"First aid kit {i + 1}", body="Bandages, eyewash, burn gel."))
    for i in range(4):
        hotspots.append(Hotspot(
            id=f"hs{i}", category="hs_notice",
            position=(0.2, 12.0 + i * 24.0, 1.6),
            trigger_radius=DEFAULT_TRIGGER_RADIUS,
            title=f"H&S notice {i + 1}", body="Wear eye protection in this zone."))

    # exit trigger points sit at eye height so a walking visitor can close
    # the full 3D gap and fire the 1 m arrival check at the doorway
    exits = (
        ExitPoint(id="exit_south", name="South door", position=(12.0, 0.5, eye)),
        ExitPoint(id="exit_north", name="North door", position=(28.0, 99.5, eye)),
    )
    tour = TourSpec(waypoint_ids=tuple(w.id for w in waypoints), speed_mps=1.4)
    return SceneDefinition(version=1, waypoints=tuple(waypoints), tour=tour,
                           hotspots=tuple(hotspots), exits=exits)
