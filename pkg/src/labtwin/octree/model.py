"""Octree LOD data model and on-disk schema constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..errors import ValidationError
from ..geometry import Aabb

# node payload record: f32 position relative to root min + 8-bit RGB
POINT_RECORD_DTYPE = np.dtype([
    ("x", "<f4"), ("y", "<f4"), ("z", "<f4"),
    ("r", "u1"), ("g", "u1"), ("b", "u1"), ("pad", "u1"),
])
POINT_RECORD_BYTES = POINT_RECORD_DTYPE.itemsize  # 16
RECORD_LAYOUT = "f32x3_rel+u8rgb+pad"

MANIFEST_FILE = "manifest.json"
HIERARCHY_FILE = "hierarchy.json"
BIN_FILE = "octree.bin"

AUTO_ROOT_SPACING_DIVISOR = 250.0


@dataclass
class OctreeNode:
    """One hierarchy node; ``name`` is the octant path from the root "r"."""

    name: str
    level: int
    bounds: Aabb
    spacing: float
    num_points: int
    byte_offset: int
    byte_size: int
    child_mask: int
    overflow: bool = False

    @property
    def parent_name(self) -> str | None:
        return self.name[:-1] if len(self.name) > 1 else None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "level": self.level,
            "num_points": self.num_points,
            "byte_offset": self.byte_offset,
            "byte_size": self.byte_size,
            "child_mask": self.child_mask,
        }


@dataclass
class LodManifest:
    version: int
    bounds: Aabb
    root_spacing: float
    total_points: int
    record: str
    hierarchy_digest: str
    overflow_nodes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "bounds": self.bounds.to_json(),
            "root_spacing": self.root_spacing,
            "total_points": self.total_points,
            "record": self.record,
            "hierarchy_digest": self.hierarchy_digest,
            "overflow_nodes": list(self.overflow_nodes),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LodManifest":
        if obj.get("version") != 1:
            raise ValidationError(f"unsupported manifest version {obj.get('version')!r}")
        if obj.get("record") != RECORD_LAYOUT:
            raise ValidationError(f"unsupported record layout {obj.get('record')!r}")
        return cls(
            version=obj["version"],
            bounds=Aabb.from_json(obj["bounds"]),
            root_spacing=float(obj["root_spacing"]),
            total_points=int(obj["total_points"]),
            record=obj["record"],
            hierarchy_digest=obj["hierarchy_digest"],
            overflow_nodes=list(obj.get("overflow_nodes", [])),
        )


@dataclass(frozen=True)
class BuildConfig:
    root_spacing: Union[float, str] = "auto"  # meters or "auto" = diagonal / 250
    max_level: int = 12
    leaf_capacity: int = 20000
    memory_budget: int = 1 << 30  # bytes for the out-of-core chunking stage

    def __post_init__(self):
        if self.root_spacing != "auto" and float(self.root_spacing) <= 0:
            raise ValidationError("root_spacing must be > 0 or 'auto'")
        if self.max_level < 0:
            raise ValidationError("max_level must be >= 0")
        if self.leaf_capacity < 1:
            raise ValidationError("leaf_capacity must be >= 1")
        if self.memory_budget < 1 << 20:
            raise ValidationError("memory_budget must be at least 1 MiB")

    def resolve_root_spacing(self, root_bounds: Aabb) -> float:
        if self.root_spacing == "auto":
            return root_bounds.diagonal / AUTO_ROOT_SPACING_DIVISOR
        return float(self.root_spacing)


@dataclass
class LodSelection:
    node_names: list[str]
    total_points_selected: int
    bytes_selected: int


@dataclass
class CameraView:
    """Perspective camera in the world frame (Z-up)."""

    position: np.ndarray
    forward: np.ndarray
    up: np.ndarray
    vertical_fov: float = 60.0  # degrees
    aspect: float = 16.0 / 9.0
    viewport_height: int = 1080
    near: float = 0.1
    far: float = 1000.0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64)
        f = np.asarray(self.forward, dtype=np.float64)
        u = np.asarray(self.up, dtype=np.float64)
        nf = np.linalg.norm(f)
        if nf == 0:
            raise ValidationError("forward vector must be nonzero")
        f = f / nf
        r = np.cross(f, u)
        nr = np.linalg.norm(r)
        if nr == 0:
            raise ValidationError("up must not be parallel to forward")
        r = r / nr
        self.forward = f
        self.right = r
        self.up = np.cross(r, f)
        if not (0.0 < self.vertical_fov < 180.0):
            raise ValidationError("vertical_fov must be in (0, 180) degrees")
        if not (0.0 < self.near < self.far):
            raise ValidationError("need 0 < near < far")

    @property
    def tan_half_fov(self) -> float:
        return math.tan(math.radians(self.vertical_fov) / 2.0)


def node_bounds(root: Aabb, name: str) -> Aabb:
    """Recompute a node's cube by walking its octant path from the root."""
    if not name.startswith("r"):
        raise ValidationError(f"bad node name {name!r}")
    b = root
    for ch in name[1:]:
        d = ord(ch) - ord("0")
        if not 0 <= d <= 7:
            raise ValidationError(f"bad node name {name!r}")
        b = b.octant(d)
    return b


def node_spacing(root_spacing: float, level: int) -> float:
    return root_spacing / (2.0 ** level)
