"""Runtime LOD node selection and screen-space point sizing.

Selection rule: the root is always a candidate; any other node is a
candidate iff its cube intersects the view frustum (conservative
p-vertex test against the six planes) and its projected extent

    viewport_height * node_radius / (distance_to_bounds * tan(fov/2))

is at least ``min_pixels`` (a node containing the camera has infinite
extent). Candidates are ranked by descending extent, ties by name; the
root is considered first. Admission walks the rank order: a node whose
parent was not admitted is passed over, and the first parent-admitted node
that does not fit the remaining point budget ends the selection. Stopping
(rather than skipping past misfits) makes the selected set monotone in the
budget; the selection is always a rooted subtree.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ValidationError
from .model import CameraView, LodSelection, OctreeNode


def frustum_planes(view: CameraView) -> list[tuple[np.ndarray, np.ndarray]]:
    """Six (inward_normal, point_on_plane) pairs."""
    f, r, u = view.forward, view.right, view.up
    pos = view.position
    tv = view.tan_half_fov
    th = tv * view.aspect
    planes = [
        (f, pos + f * view.near),
        (-f, pos + f * view.far),
    ]
    for edge_dir in (f - th * r, f + th * r):
        n = np.cross(u, edge_dir)
        if np.dot(n, f) < 0:
            n = -n
        planes.append((n / np.linalg.norm(n), pos))
    for edge_dir in (f - tv * u, f + tv * u):
        n = np.cross(r, edge_dir)
        if np.dot(n, f) < 0:
            n = -n
        planes.append((n / np.linalg.norm(n), pos))
    return planes


def aabb_intersects_frustum(bmin: np.ndarray, bmax: np.ndarray,
                            planes) -> np.ndarray:
    """Vectorized conservative test; bmin/bmax are (N, 3)."""
    ok = np.ones(len(bmin), dtype=bool)
    for n, p0 in planes:
        pv = np.where(n >= 0, bmax, bmin)  # positive vertex per plane
        ok &= (pv - p0) @ n >= 0
    return ok


def projected_extent(view: CameraView, bmin: np.ndarray,
                     bmax: np.ndarray) -> np.ndarray:
    """Screen-space node diameter in pixels; inf when the camera is inside."""
    d = np.maximum(np.maximum(bmin - view.position, view.position - bmax), 0.0)
    dist = np.sqrt((d * d).sum(axis=1))
    radius = 0.5 * np.sqrt(((bmax - bmin) ** 2).sum(axis=1))
    with np.errstate(divide="ignore"):
        ext = view.viewport_height * radius / (dist * view.tan_half_fov)
    ext[dist == 0.0] = np.inf
    return ext


def select_nodes(nodes: list[OctreeNode], view: CameraView, point_budget: int,
                 min_pixels: float = 0.0) -> LodSelection:
    if point_budget <= 0:
        raise ValidationError("point_budget must be > 0")
    names = [n.name for n in nodes]
    index = {name: i for i, name in enumerate(names)}
    root_i = index.get("r")
    if root_i is None:
        raise ValidationError("hierarchy has no root node")
    if nodes[root_i].num_points > point_budget:
        raise ValidationError("budget below root size")

    bmin = np.array([n.bounds.min for n in nodes])
    bmax = np.array([n.bounds.max for n in nodes])
    ext = projected_extent(view, bmin, bmax)
    visible = aabb_intersects_frustum(bmin, bmax, frustum_planes(view))
    candidate = visible & (ext >= min_pixels)
    candidate[root_i] = True  # root is unconditional

    order = sorted(np.flatnonzero(candidate),
                   key=lambda i: (-ext[i], names[i]))
    order.remove(root_i)
    order.insert(0, root_i)
    admitted: set[str] = set()
    selected: list[int] = []
    remaining = point_budget
    for i in order:
        n = nodes[i]
        parent = n.parent_name
        if parent is not None and parent not in admitted:
            continue
        if n.num_points > remaining:
            break
        admitted.add(n.name)
        selected.append(i)
        remaining -= n.num_points
    sel_nodes = [nodes[i] for i in selected]
    return LodSelection(
        node_names=[n.name for n in sel_nodes],
        total_points_selected=sum(n.num_points for n in sel_nodes),
        bytes_selected=sum(n.byte_size for n in sel_nodes),
    )


def adaptive_point_size(node: OctreeNode, view: CameraView) -> float:
    """Pixel size so a point roughly covers its spacing on screen; in [1, 16]."""
    dist = node.bounds.distance_to(view.position)
    if dist == 0.0:
        return 16.0
    size = view.viewport_height * node.spacing / (dist * 2.0 * view.tan_half_fov)
    return float(min(max(size, 1.0), 16.0))
