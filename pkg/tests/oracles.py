"""Independent reference implementations used as test oracles.

Everything here is deliberately naive (brute force, dense sampling, scalar
loops) and shares no code with the production paths it checks.
"""

from __future__ import annotations

import math

import numpy as np


def min_pairwise_distance(pos: np.ndarray) -> float:
    """O(n^2) brute force."""
    n = len(pos)
    best = math.inf
    for i in range(n):
        d = np.linalg.norm(pos[i + 1:] - pos[i], axis=1)
        if len(d):
            best = min(best, float(d.min()))
    return best


def every_dropped_near_kept(kept: np.ndarray, dropped: np.ndarray,
                            spacing: float) -> bool:
    for p in dropped:
        if float(np.linalg.norm(kept - p, axis=1).min()) >= spacing:
            return False
    return True


# --- naive octree builder ---------------------------------------------------

class NaiveNode:
    def __init__(self, name, level, lo, hi, spacing):
        self.name = name
        self.level = level
        self.lo = np.asarray(lo, float)
        self.hi = np.asarray(hi, float)
        self.spacing = spacing
        self.points: list[np.ndarray] = []
        self.colors: list[np.ndarray] = []
        self.children: dict[int, "NaiveNode"] = {}
        self.overflow = False


def naive_build(pos: np.ndarray, rgb: np.ndarray, root_lo, root_hi,
                root_spacing: float, max_level: int) -> dict[str, NaiveNode]:
    """Strict top-down min-spacing insertion, one point at a time, O(n^2)."""
    root = NaiveNode("r", 0, root_lo, root_hi, root_spacing)
    for p, c in zip(pos, rgb):
        node = root
        while True:
            conflict = any(np.linalg.norm(q - p) < node.spacing
                           for q in node.points)
            if not conflict:
                node.points.append(p.copy())
                node.colors.append(c.copy())
                break
            if node.level >= max_level:
                node.points.append(p.copy())
                node.colors.append(c.copy())
                node.overflow = True
                break
            mid = 0.5 * (node.lo + node.hi)
            d = (4 if p[0] >= mid[0] else 0) + (2 if p[1] >= mid[1] else 0) \
                + (1 if p[2] >= mid[2] else 0)
            if d not in node.children:
                lo = node.lo.copy()
                hi = mid.copy()
                for axis, bit in ((0, 4), (1, 2), (2, 1)):
                    if d & bit:
                        lo[axis] = mid[axis]
                        hi[axis] = node.hi[axis]
                node.children[d] = NaiveNode(node.name + str(d),
                                             node.level + 1, lo, hi,
                                             node.spacing / 2.0)
            node = node.children[d]
    out: dict[str, NaiveNode] = {}

    def walk(n: NaiveNode):
        out[n.name] = n
        for d in sorted(n.children):
            walk(n.children[d])

    walk(root)
    return out


# --- selection ranking oracle ----------------------------------------------

def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def oracle_select(nodes, view, point_budget: int, min_pixels: float = 0.0):
    """Scalar reimplementation of the documented ranking/admission rule.

    Plain-float math throughout; shares no code with the vectorized path.
    """
    f = tuple(float(v) for v in view.forward)
    r = tuple(float(v) for v in view.right)
    u = tuple(float(v) for v in view.up)
    eye = tuple(float(v) for v in view.position)
    tv = math.tan(math.radians(view.vertical_fov) / 2.0)
    th = tv * view.aspect

    planes = []  # (normal, point on plane)
    planes.append((f, tuple(eye[k] + f[k] * view.near for k in range(3))))
    planes.append((tuple(-v for v in f),
                   tuple(eye[k] + f[k] * view.far for k in range(3))))
    for basis, t in ((r, th), (u, tv)):
        for sign in (-1.0, 1.0):
            edge = tuple(f[k] + sign * t * basis[k] for k in range(3))
            axis = u if basis is r else r
            n = _cross(axis, edge)
            if sum(n[k] * f[k] for k in range(3)) < 0:
                n = tuple(-v for v in n)
            mag = math.sqrt(sum(v * v for v in n))
            planes.append((tuple(v / mag for v in n), eye))

    def intersects(node) -> bool:
        lo = node.bounds.min
        hi = node.bounds.max
        for n_vec, p0 in planes:
            s = 0.0
            for k in range(3):
                pv = hi[k] if n_vec[k] >= 0 else lo[k]
                s += (pv - p0[k]) * n_vec[k]
            if s < 0:
                return False
        return True

    def extent(node) -> float:
        lo = node.bounds.min
        hi = node.bounds.max
        d = 0.0
        for k in range(3):
            gap = max(lo[k] - eye[k], eye[k] - hi[k], 0.0)
            d += gap * gap
        dist = math.sqrt(d)
        radius = 0.5 * math.sqrt(sum((hi[k] - lo[k]) ** 2 for k in range(3)))
        if dist == 0.0:
            return math.inf
        return view.viewport_height * radius / (dist * tv)

    scored = []
    for node in nodes:
        ok = node.name == "r" or (intersects(node)
                                  and extent(node) >= min_pixels)
        if ok:
            scored.append((-extent(node), node.name, node))
    scored.sort(key=lambda t: (t[0], t[1]))
    scored = ([t for t in scored if t[2].name == "r"]
              + [t for t in scored if t[2].name != "r"])
    admitted = {}
    remaining = point_budget
    for _, _, node in scored:
        parent = node.name[:-1] if len(node.name) > 1 else None
        if parent is not None and parent not in admitted:
            continue
        if node.num_points > remaining:
            break
        admitted[node.name] = node
        remaining -= node.num_points
    return sorted(admitted)


# --- spline length oracle ---------------------------------------------------

def dense_arc_length(path, segments: int = 1_000_000) -> float:
    """Numerical integration by uniform dense sampling of the spline itself."""
    from labtwin.path import _eval_segment, _hermite_tangents

    controls = path.controls
    tangents = _hermite_tangents(controls)
    per_seg = max(segments // (len(controls) - 1), 1)
    total = 0.0
    for i in range(len(controls) - 1):
        us = np.linspace(0.0, 1.0, per_seg + 1)
        pts = np.array([_eval_segment(controls[i], controls[i + 1],
                                      tangents[i], tangents[i + 1], u)
                        for u in us])
        total += float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
    return total


def ray_sphere_brute(origin, direction, center, radius):
    """Closed-form entry distance, derived independently via the quadratic."""
    o = np.asarray(origin, float) - np.asarray(center, float)
    d = np.asarray(direction, float)
    a = float(d @ d)
    b = 2.0 * float(o @ d)
    c = float(o @ o) - radius * radius
    if c <= 0:
        return 0.0
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    t1 = (-b - math.sqrt(disc)) / (2 * a)
    t2 = (-b + math.sqrt(disc)) / (2 * a)
    for t in (t1, t2):
        if t >= 0:
            return t
    return None
