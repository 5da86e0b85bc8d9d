"""Load and random-access the on-disk LOD dataset."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from .model import (BIN_FILE, HIERARCHY_FILE, MANIFEST_FILE, POINT_RECORD_DTYPE,
                    LodManifest, OctreeNode, node_bounds, node_spacing)


def load_hierarchy(dataset_dir) -> tuple[LodManifest, list[OctreeNode]]:
    """Load and verify manifest + hierarchy; checks digest and bin size."""
    dataset_dir = Path(dataset_dir)
    manifest_path = dataset_dir / MANIFEST_FILE
    hierarchy_path = dataset_dir / HIERARCHY_FILE
    bin_path = dataset_dir / BIN_FILE
    for p in (manifest_path, hierarchy_path, bin_path):
        if not p.exists():
            raise ValidationError(f"{p}: missing dataset file")

    manifest = LodManifest.from_json(json.loads(manifest_path.read_text()))
    hier_bytes = hierarchy_path.read_bytes()
    digest = "sha256:" + hashlib.sha256(hier_bytes).hexdigest()
    if digest != manifest.hierarchy_digest:
        raise ValidationError(
            f"{hierarchy_path}: digest mismatch (expected "
            f"{manifest.hierarchy_digest}, got {digest})")

    overflow = set(manifest.overflow_nodes)
    nodes = []
    total = 0
    end = 0
    for rec in json.loads(hier_bytes):
        name = rec["name"]
        level = int(rec["level"])
        if level != len(name) - 1:
            raise ValidationError(f"node {name}: level {level} does not match name")
        nodes.append(OctreeNode(
            name=name,
            level=level,
            bounds=node_bounds(manifest.bounds, name),
            spacing=node_spacing(manifest.root_spacing, level),
            num_points=int(rec["num_points"]),
            byte_offset=int(rec["byte_offset"]),
            byte_size=int(rec["byte_size"]),
            child_mask=int(rec["child_mask"]),
            overflow=name in overflow,
        ))
        n = nodes[-1]
        if n.byte_size != n.num_points * POINT_RECORD_DTYPE.itemsize:
            raise ValidationError(f"node {name}: byte_size/num_points mismatch")
        total += n.num_points
        end = max(end, n.byte_offset + n.byte_size)
    if total != manifest.total_points:
        raise ValidationError(
            f"manifest total_points {manifest.total_points} != node sum {total}")
    size = bin_path.stat().st_size
    if size < end:
        raise ValidationError(f"{bin_path}: truncated ({size} < {end} bytes)")
    return manifest, nodes


def read_node_records(dataset_dir, node: OctreeNode) -> np.ndarray:
    """Raw 16-byte records of one node."""
    bin_path = Path(dataset_dir) / BIN_FILE
    with open(bin_path, "rb") as fh:
        fh.seek(node.byte_offset)
        buf = fh.read(node.byte_size)
    if len(buf) != node.byte_size:
        raise ValidationError(f"{bin_path}: short read for node {node.name}")
    return np.frombuffer(buf, dtype=POINT_RECORD_DTYPE)


def read_node_points(dataset_dir, node_name: str,
                     manifest: LodManifest | None = None,
                     nodes: list[OctreeNode] | None = None):
    """Decode one node's points back to world positions + colors."""
    if manifest is None or nodes is None:
        manifest, nodes = load_hierarchy(dataset_dir)
    by_name = {n.name: n for n in nodes}
    node = by_name.get(node_name)
    if node is None:
        raise ValidationError(f"unknown node {node_name!r}")
    rec = read_node_records(dataset_dir, node)
    rel = np.column_stack([rec["x"], rec["y"], rec["z"]]).astype(np.float64)
    pos = manifest.bounds.min + rel
    rgb = np.column_stack([rec["r"], rec["g"], rec["b"]])
    return pos, rgb
