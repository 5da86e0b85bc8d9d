"""Multi-level octree LOD dataset: build, serialize, query, select."""

from .build import build_octree
from .model import (BuildConfig, CameraView, LodManifest, LodSelection,
                    OctreeNode, POINT_RECORD_DTYPE)
from .select import adaptive_point_size, select_nodes
from .storage import load_hierarchy, read_node_points, read_node_records

__all__ = [
    "build_octree", "load_hierarchy", "read_node_points", "read_node_records",
    "select_nodes", "adaptive_point_size",
    "OctreeNode", "LodManifest", "BuildConfig", "LodSelection", "CameraView",
    "POINT_RECORD_DTYPE",
]
