"""Arc-length-parameterized tour path through waypoints.

Centripetal Catmull-Rom spline with duplicated phantom endpoints, evaluated
in cubic Hermite form. Arc length comes from adaptive chord subdivision to
1 mm, giving a monotone arc -> (position, yaw, pitch) lookup with constant
traversal speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry import signed_deg
from .scene import SceneDefinition, Waypoint

ARC_TOLERANCE = 1e-3  # meters


def _hermite_tangents(controls: np.ndarray) -> np.ndarray:
    """Per-control tangents of the centripetal spline (alpha = 1/2).

    Degenerate knot intervals (duplicated phantom endpoints or coincident
    waypoints) contribute zero, which yields natural zero end tangents.
    """
    ext = np.vstack([controls[:1], controls, controls[-1:]])
    d = np.sqrt(np.linalg.norm(np.diff(ext, axis=0), axis=1))  # |dP|^alpha
    tangents = np.zeros_like(controls)
    for i in range(len(controls)):
        p0, p1, p2 = ext[i], ext[i + 1], ext[i + 2]
        d01, d12 = d[i], d[i + 1]
        t = np.zeros(3)
        if d01 > 0:
            t += (p1 - p0) / d01
        if d12 > 0:
            t += (p2 - p1) / d12
        if d01 + d12 > 0:
            t -= (p2 - p0) / (d01 + d12)
        tangents[i] = t
    return tangents


@dataclass
class TourPath:
    """Piecewise spline with a monotone arc-length lookup table."""

    controls: np.ndarray          # (M, 3) waypoint positions
    yaws: np.ndarray              # (M,) degrees
    pitches: np.ndarray           # (M,) degrees
    total_length: float
    waypoint_arcs: np.ndarray     # (M,) cumulative arc at each control
    _samples: np.ndarray          # (K, 3) dense polyline
    _sample_arcs: np.ndarray      # (K,) cumulative arc

    def sample(self, s: float) -> tuple[np.ndarray, float, float]:
        """Position/yaw/pitch at arc length ``s`` (clamped to [0, length])."""
        s = float(min(max(s, 0.0), self.total_length))
        k = int(np.searchsorted(self._sample_arcs, s, side="right")) - 1
        k = min(max(k, 0), len(self._samples) - 2)
        seg = self._sample_arcs[k + 1] - self._sample_arcs[k]
        u = 0.0 if seg == 0 else (s - self._sample_arcs[k]) / seg
        pos = self._samples[k] + u * (self._samples[k + 1] - self._samples[k])

        j = int(np.searchsorted(self.waypoint_arcs, s, side="right")) - 1
        j = min(max(j, 0), len(self.controls) - 2)
        span = self.waypoint_arcs[j + 1] - self.waypoint_arcs[j]
        v = 0.0 if span == 0 else (s - self.waypoint_arcs[j]) / span
        v = min(max(v, 0.0), 1.0)
        yaw = (self.yaws[j] + v * signed_deg(self.yaws[j + 1] - self.yaws[j])) % 360.0
        pitch = self.pitches[j] + v * (self.pitches[j + 1] - self.pitches[j])
        return pos, float(yaw), float(pitch)


def _eval_segment(p1, p2, m1, m2, u):
    u2 = u * u
    u3 = u2 * u
    h00 = 2 * u3 - 3 * u2 + 1
    h10 = u3 - 2 * u2 + u
    h01 = -2 * u3 + 3 * u2
    h11 = u3 - u2
    return h00 * p1 + h10 * m1 + h01 * p2 + h11 * m2


def _flatten_segment(p1, p2, m1, m2, tol: float) -> list[tuple[float, np.ndarray]]:
    """Adaptive subdivision: (u, point) samples with chord error under tol."""
    out: list[tuple[float, np.ndarray]] = []

    def recurse(u0, q0, u1, q1, depth):
        um = 0.5 * (u0 + u1)
        qm = _eval_segment(p1, p2, m1, m2, um)
        flat = abs(np.linalg.norm(qm - q0) + np.linalg.norm(q1 - qm)
                   - np.linalg.norm(q1 - q0)) < tol
        if flat and depth >= 4 or depth >= 16:
            out.append((u1, q1))
            return
        recurse(u0, q0, um, qm, depth + 1)
        recurse(um, qm, u1, q1, depth + 1)

    q0 = _eval_segment(p1, p2, m1, m2, 0.0)
    q1 = _eval_segment(p1, p2, m1, m2, 1.0)
    recurse(0.0, q0, 1.0, q1, 0)
    return out


def build_path(waypoints: list[Waypoint]) -> TourPath:
    if len(waypoints) < 2:
        raise ValidationError("a tour path needs at least 2 waypoints")
    controls = np.array([wp.position for wp in waypoints], dtype=np.float64)
    yaws = np.array([wp.yaw_deg for wp in waypoints], dtype=np.float64)
    pitches = np.array([wp.pitch_deg for wp in waypoints], dtype=np.float64)
    tangents = _hermite_tangents(controls)

    samples = [controls[0]]
    arcs = [0.0]
    waypoint_arcs = [0.0]
    tol = ARC_TOLERANCE / max(len(controls) - 1, 1)
    for i in range(len(controls) - 1):
        for _, q in _flatten_segment(controls[i], controls[i + 1],
                                     tangents[i], tangents[i + 1], tol):
            arcs.append(arcs[-1] + float(np.linalg.norm(q - samples[-1])))
            samples.append(q)
        waypoint_arcs.append(arcs[-1])
    return TourPath(
        controls=controls, yaws=yaws, pitches=pitches,
        total_length=arcs[-1],
        waypoint_arcs=np.array(waypoint_arcs),
        _samples=np.array(samples),
        _sample_arcs=np.array(arcs),
    )


def build_tour_path(scene: SceneDefinition) -> TourPath:
    if scene.tour is None or len(scene.tour.waypoint_ids) < 2:
        raise ValidationError("scene tour needs at least 2 waypoints")
    return build_path([scene.waypoint(i) for i in scene.tour.waypoint_ids])
