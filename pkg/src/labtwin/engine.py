"""Headless interaction engine.

Pure state-transition functions over ``SessionState``: first-person
kinematics, teleport, auto-tour playback, hotspot picking with progress
tracking, straight-line evacuation guidance, and measurement. Replaying an
input log through these functions reproduces a trajectory bit-for-bit.

Frame conventions: Z-up meters; yaw 0 looks along +Y ("north") and grows
clockwise seen from above, so forward = (sin yaw, cos yaw, 0); pitch is
positive upward and clamped to [-89, 89] degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ValidationError
from .geometry import normalize_deg, signed_deg
from .path import TourPath
from .scene import SceneDefinition

ARRIVAL_THRESHOLD_M = 1.0


@dataclass(frozen=True)
class KinematicsConfig:
    eye_height: float = 1.70          # meters
    walk_speed: float = 1.60          # meters/second
    rotate_sensitivity: float = 0.15  # degrees per input unit
    gravity_enabled: bool = True
    floor_z: float = 0.0              # flat-floor model

    def __post_init__(self):
        if self.eye_height <= 0 or self.walk_speed <= 0 or self.rotate_sensitivity <= 0:
            raise ValidationError("kinematics parameters must be positive")


@dataclass(frozen=True)
class CameraPose:
    position: tuple[float, float, float]
    yaw_deg: float
    pitch_deg: float

    def __post_init__(self):
        object.__setattr__(self, "yaw_deg", normalize_deg(self.yaw_deg))
        object.__setattr__(self, "pitch_deg",
                          float(min(max(self.pitch_deg, -89.0), 89.0)))

    @property
    def forward(self) -> np.ndarray:
        yaw = math.radians(self.yaw_deg)
        pitch = math.radians(self.pitch_deg)
        return np.array([math.cos(pitch) * math.sin(yaw),
                         math.cos(pitch) * math.cos(yaw),
                         math.sin(pitch)])


@dataclass(frozen=True)
class GuidanceState:
    exit_id: str
    bearing_deg: float
    relative_bearing_deg: float
    distance_m: float
    arrived: bool


@dataclass(frozen=True)
class SessionState:
    pose: CameraPose
    mode: str = "free"  # free | tour | escape
    tour_progress: float = 0.0
    viewed: frozenset[str] = field(default_factory=frozenset)
    guidance: Optional[GuidanceState] = None
    clock: float = 0.0


def initial_state(pose: CameraPose) -> SessionState:
    return SessionState(pose=pose)


def _require_mode(state: SessionState, mode: str) -> None:
    if state.mode != mode:
        raise ValidationError(f"operation requires mode {mode!r}, state is {state.mode!r}")


# --- free roaming -----------------------------------------------------------

def step_free(state: SessionState, move, look, dt: float,
              cfg: KinematicsConfig) -> SessionState:
    """Walk/look step: ``move`` is a unit-square (strafe, forward) pair,
    ``look`` is (yaw, pitch) input units."""
    _require_mode(state, "free")
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    mx = min(max(float(move[0]), -1.0), 1.0)
    my = min(max(float(move[1]), -1.0), 1.0)
    yaw = normalize_deg(state.pose.yaw_deg + float(look[0]) * cfg.rotate_sensitivity)
    pitch = state.pose.pitch_deg + float(look[1]) * cfg.rotate_sensitivity

    yr = math.radians(yaw)
    fwd = (math.sin(yr), math.cos(yr))
    right = (math.cos(yr), -math.sin(yr))
    step = cfg.walk_speed * dt
    x = state.pose.position[0] + step * (mx * right[0] + my * fwd[0])
    y = state.pose.position[1] + step * (mx * right[1] + my * fwd[1])
    z = state.pose.position[2]
    if cfg.gravity_enabled:
        z = cfg.floor_z + cfg.eye_height
    return replace(state,
                   pose=CameraPose((x, y, z), yaw, pitch),
                   clock=state.clock + dt)


def teleport(state: SessionState, scene: SceneDefinition,
             waypoint_id: str) -> SessionState:
    """Jump to a waypoint; always lands in free mode with guidance cleared."""
    wp = scene.waypoint(waypoint_id)
    return replace(state,
                   pose=CameraPose(wp.position, wp.yaw_deg, wp.pitch_deg),
                   mode="free", guidance=None, tour_progress=0.0)


# --- auto tour --------------------------------------------------------------

def start_tour(state: SessionState, path: TourPath) -> SessionState:
    pos, yaw, pitch = path.sample(0.0)
    return replace(state, mode="tour", tour_progress=0.0, guidance=None,
                   pose=CameraPose(tuple(pos), yaw, pitch))


def step_tour(state: SessionState, dt: float, path: TourPath,
              speed_mps: float, paused: bool = False) -> SessionState:
    _require_mode(state, "tour")
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    if paused:
        return replace(state, clock=state.clock + dt)
    progress = min(state.tour_progress + speed_mps * dt, path.total_length)
    pos, yaw, pitch = path.sample(progress)
    mode = "free" if progress >= path.total_length else "tour"
    return replace(state, mode=mode, tour_progress=progress,
                   pose=CameraPose(tuple(pos), yaw, pitch),
                   clock=state.clock + dt)


# --- hotspots ---------------------------------------------------------------

def ray_sphere_hit(origin: np.ndarray, direction: np.ndarray,
                   center: np.ndarray, radius: float) -> Optional[float]:
    """Distance along a unit ray to a sphere, or None; 0 if origin inside."""
    oc = origin - center
    c = float(oc @ oc) - radius * radius
    if c <= 0:
        return 0.0
    b = float(oc @ direction)
    disc = b * b - c
    if disc < 0:
        return None
    t = -b - math.sqrt(disc)
    return t if t >= 0 else None


def pick_hotspot(scene: SceneDefinition, origin, direction,
                 max_range: float) -> Optional[str]:
    """Nearest hotspot whose trigger sphere the ray hits within range;
    ties on hit distance break by id order."""
    if max_range <= 0:
        raise ValidationError("max_range must be > 0")
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    n = np.linalg.norm(direction)
    if n == 0:
        raise ValidationError("ray direction must be nonzero")
    direction = direction / n
    best: tuple[float, str] | None = None
    for hs in scene.hotspots:
        t = ray_sphere_hit(origin, direction, np.asarray(hs.position),
                           hs.trigger_radius)
        if t is None or t > max_range:
            continue
        key = (t, hs.id)
        if best is None or key < best:
            best = key
    return best[1] if best else None


def mark_viewed(state: SessionState, scene: SceneDefinition,
                hotspot_id: str) -> tuple[SessionState, tuple[int, int]]:
    """Log a hotspot as viewed (idempotent); returns category progress."""
    hs = scene.hotspot(hotspot_id)
    viewed = state.viewed | {hotspot_id}
    in_cat = sum(1 for h in scene.hotspots
                 if h.category == hs.category and h.id in viewed)
    total = sum(1 for h in scene.hotspots if h.category == hs.category)
    return replace(state, viewed=viewed), (in_cat, total)


# --- evacuation -------------------------------------------------------------

def nearest_exit(scene: SceneDefinition, position) -> str:
    """Closest exit by 3D Euclidean distance; ties break by exit id."""
    if not scene.exits:
        raise ValidationError("scene defines no exits")
    position = np.asarray(position, dtype=np.float64)
    return min(scene.exits,
               key=lambda e: (float(np.linalg.norm(np.asarray(e.position) - position)),
                              e.id)).id


def _guidance_for(state: SessionState, scene: SceneDefinition,
                  exit_id: str) -> GuidanceState:
    exit_pt = next(e for e in scene.exits if e.id == exit_id)
    delta = np.asarray(exit_pt.position) - np.asarray(state.pose.position)
    distance = float(np.linalg.norm(delta))
    bearing = normalize_deg(math.degrees(math.atan2(delta[0], delta[1])))
    return GuidanceState(
        exit_id=exit_id,
        bearing_deg=bearing,
        relative_bearing_deg=signed_deg(bearing - state.pose.yaw_deg),
        distance_m=distance,
        arrived=distance <= ARRIVAL_THRESHOLD_M,
    )


def start_escape(state: SessionState, scene: SceneDefinition) -> SessionState:
    """Enter escape mode; the target exit is fixed for the whole episode."""
    target = nearest_exit(scene, state.pose.position)
    st = replace(state, mode="escape")
    return replace(st, guidance=_guidance_for(st, scene, target))


def update_guidance(state: SessionState,
                    scene: SceneDefinition) -> tuple[SessionState, GuidanceState]:
    """Refresh bearing/distance to the episode's target exit.

    On arrival (within 1 m) the episode completes: mode returns to free and
    guidance is cleared; the returned GuidanceState is the completion event.
    """
    _require_mode(state, "escape")
    if state.guidance is None:
        raise ValidationError("escape mode without a guidance target")
    g = _guidance_for(state, scene, state.guidance.exit_id)
    if g.arrived:
        return replace(state, mode="free", guidance=None), g
    return replace(state, guidance=g), g


def step_escape(state: SessionState, move, look, dt: float,
                cfg: KinematicsConfig,
                scene: SceneDefinition) -> tuple[SessionState, GuidanceState]:
    """Escape-mode walking: free kinematics plus live guidance refresh."""
    _require_mode(state, "escape")
    walked = step_free(replace(state, mode="free"), move, look, dt, cfg)
    return update_guidance(replace(walked, mode="escape",
                                   guidance=state.guidance), scene)


# --- measurement ------------------------------------------------------------

COORDINATE_PRECISION_M = 0.001


def measure_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(b, dtype=np.float64)
                                - np.asarray(a, dtype=np.float64)))


def measure_area(polygon) -> float:
    """Shoelace area of the polygon projected onto its best-fit plane."""
    pts = np.asarray(polygon, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 3:
        raise ValidationError("area needs at least 3 world points")
    centered = pts - pts.mean(axis=0)
    # least-squares plane: span of the two dominant singular vectors
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[1] <= s[0] * 1e-12:
        raise ValidationError("degenerate polygon: points are collinear")
    uv = centered @ vt[:2].T
    x, y = uv[:, 0], uv[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def query_coordinate(point) -> tuple[float, float, float]:
    """Echo a picked point in the world frame at millimeter precision."""
    p = np.asarray(point, dtype=np.float64)
    if p.shape != (3,) or not np.isfinite(p).all():
        raise ValidationError("pick must be a finite 3D point")
    return tuple(round(float(v) / COORDINATE_PRECISION_M) * COORDINATE_PRECISION_M
                 for v in p)
