"""Octree LOD builder.

Top-down minimum-spacing acceptance: each node keeps the points that are
mutually >= its spacing apart (first in stream order wins); every rejected
point is pushed into the child octant containing it. The node at max depth
accepts everything and is flagged as an overflow leaf if that breaks the
spacing property.

Out-of-core: a node whose incoming points exceed the in-memory limit streams
them instead, spilling rejects into one file per octant; each spill file is
then built recursively. Both paths visit points in the same order, so the
output is byte-identical regardless of the memory budget.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from ..cloud_io import BINARY_DTYPE, Chunk
from ..errors import ResourceError, ValidationError
from ..geometry import Aabb, octant_digits
from ..kernels import PoissonGrid
from .model import (BIN_FILE, HIERARCHY_FILE, MANIFEST_FILE, POINT_RECORD_DTYPE,
                    RECORD_LAYOUT, BuildConfig, LodManifest, OctreeNode)

# rough per-point working-set cost of the in-memory recursive path
_BYTES_PER_POINT_INMEM = 108


@dataclass
class BuildStats:
    node_count: int = 0
    max_level: int = 0
    total_points: int = 0
    spilled_nodes: int = 0
    peak_materialized_bytes: int = 0


def build_octree(chunks: Iterable[Chunk], bounds: Aabb, cfg: BuildConfig,
                 out_dir, stats: Optional[BuildStats] = None) -> LodManifest:
    """Build the LOD dataset under ``out_dir`` (manifest/hierarchy/octree.bin)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    builder = _Builder(bounds, cfg, out_dir, stats or BuildStats())
    try:
        manifest = builder.run(iter(chunks))
    finally:
        builder.cleanup()
    return manifest


class _Builder:
    def __init__(self, bounds: Aabb, cfg: BuildConfig, out_dir: Path,
                 stats: BuildStats):
        self.cfg = cfg
        self.root_bounds = bounds.cubified()
        self.root_spacing = cfg.resolve_root_spacing(self.root_bounds)
        self.out_dir = out_dir
        self.stats = stats
        self.spill_dir = out_dir / ".spill"
        self.inmem_limit = max(cfg.memory_budget // _BYTES_PER_POINT_INMEM, 1024)
        self.nodes: list[OctreeNode] = []
        self.overflow: list[str] = []
        self.offset = 0
        self._bin = None

    def run(self, chunks: Iterator[Chunk]) -> LodManifest:
        self.spill_dir.mkdir(exist_ok=True)
        with open(self.out_dir / BIN_FILE, "wb") as bin_file:
            self._bin = bin_file
            self._build_stream("r", 0, self.root_bounds, self.root_spacing, chunks)
        self._bin = None
        if not self.nodes:
            raise ValidationError("cannot build an octree from an empty cloud")
        return self._write_metadata()

    def cleanup(self) -> None:
        shutil.rmtree(self.spill_dir, ignore_errors=True)

    # --- node construction --------------------------------------------------

    def _build_stream(self, name: str, level: int, bounds: Aabb,
                      spacing: float, chunks: Iterator[Chunk]) -> int | None:
        """Build a node from a chunk stream; returns its index in self.nodes."""
        buffered: list[Chunk] = []
        buffered_pts = 0
        for chunk in chunks:
            buffered.append(chunk)
            buffered_pts += len(chunk[0])
            if buffered_pts > self.inmem_limit:
                return self._build_spilling(name, level, bounds, spacing,
                                            buffered, chunks)
        if buffered_pts == 0:
            return None
        pos = np.concatenate([p for p, _ in buffered])
        rgb = np.concatenate([c for _, c in buffered])
        del buffered
        return self._build_arrays(name, level, bounds, spacing, pos, rgb)

    def _build_arrays(self, name: str, level: int, bounds: Aabb,
                      spacing: float, pos: np.ndarray, rgb: np.ndarray) -> int:
        self._note_materialized(len(pos))
        grid = PoissonGrid(spacing)
        mask = grid.insert(np.ascontiguousarray(pos))
        if level >= self.cfg.max_level:
            if not mask.all():
                self.overflow.append(name)
            idx = self._emit(name, level, bounds, spacing, pos, rgb,
                             overflow=not bool(mask.all()))
            return idx
        keep = pos[mask]
        keep_rgb = rgb[mask]
        rej = pos[~mask]
        rej_rgb = rgb[~mask]
        del pos, rgb, grid
        idx = self._emit(name, level, bounds, spacing, keep, keep_rgb)
        del keep, keep_rgb
        child_mask = 0
        if len(rej):
            digits = octant_digits(rej, bounds.center)
            for d in range(8):
                sel = digits == d
                if not sel.any():
                    continue
                ci = self._build_arrays(name + str(d), level + 1,
                                        bounds.octant(d), spacing / 2.0,
                                        rej[sel], rej_rgb[sel])
                if ci is not None:
                    child_mask |= 1 << d
        self.nodes[idx].child_mask = child_mask
        return idx

    def _build_spilling(self, name: str, level: int, bounds: Aabb,
                        spacing: float, buffered: list[Chunk],
                        rest: Iterator[Chunk]) -> int:
        self.stats.spilled_nodes += 1
        if level >= self.cfg.max_level:
            raise ResourceError(
                f"node {name} at max_level exceeds the in-memory point limit; "
                f"raise memory_budget or max_level")
        grid = PoissonGrid(spacing)
        acc_pos: list[np.ndarray] = []
        acc_rgb: list[np.ndarray] = []
        center = bounds.center
        spill_files = [None] * 8

        def feed(pos: np.ndarray, rgb: np.ndarray) -> None:
            mask = grid.insert(np.ascontiguousarray(pos))
            acc_pos.append(pos[mask])
            acc_rgb.append(rgb[mask])
            rej = pos[~mask]
            if not len(rej):
                return
            rej_rgb = rgb[~mask]
            digits = octant_digits(rej, center)
            for d in range(8):
                sel = digits == d
                if not sel.any():
                    continue
                if spill_files[d] is None:
                    path = self.spill_dir / f"{name}{d}.spill"
                    spill_files[d] = open(path, "wb")
                rec = np.zeros(int(sel.sum()), dtype=BINARY_DTYPE)
                sub = rej[sel]
                rec["x"], rec["y"], rec["z"] = sub[:, 0], sub[:, 1], sub[:, 2]
                crgb = rej_rgb[sel]
                rec["r"], rec["g"], rec["b"] = crgb[:, 0], crgb[:, 1], crgb[:, 2]
                spill_files[d].write(rec.tobytes())

        try:
            for pos, rgb in buffered:
                feed(pos, rgb)
            buffered.clear()
            for pos, rgb in rest:
                feed(pos, rgb)
        finally:
            paths = []
            for d, fh in enumerate(spill_files):
                if fh is not None:
                    fh.close()
                    paths.append((d, self.spill_dir / f"{name}{d}.spill"))

        keep = np.concatenate(acc_pos) if acc_pos else np.empty((0, 3))
        keep_rgb = np.concatenate(acc_rgb) if acc_rgb else np.empty((0, 3), np.uint8)
        self._note_materialized(len(keep))
        acc_pos.clear()
        acc_rgb.clear()
        idx = self._emit(name, level, bounds, spacing, keep, keep_rgb)
        del keep, keep_rgb
        child_mask = 0
        for d, path in paths:
            ci = self._build_stream(name + str(d), level + 1, bounds.octant(d),
                                    spacing / 2.0, _read_spill(path, self.cfg))
            path.unlink()
            if ci is not None:
                child_mask |= 1 << d
        self.nodes[idx].child_mask = child_mask
        return idx

    def _emit(self, name: str, level: int, bounds: Aabb, spacing: float,
              pos: np.ndarray, rgb: np.ndarray, overflow: bool = False) -> int:
        rec = np.zeros(len(pos), dtype=POINT_RECORD_DTYPE)
        rel = (pos - self.root_bounds.min).astype(np.float32)
        rec["x"], rec["y"], rec["z"] = rel[:, 0], rel[:, 1], rel[:, 2]
        rec["r"], rec["g"], rec["b"] = rgb[:, 0], rgb[:, 1], rgb[:, 2]
        payload = rec.tobytes()
        self._bin.write(payload)
        node = OctreeNode(
            name=name, level=level, bounds=bounds, spacing=spacing,
            num_points=len(pos), byte_offset=self.offset,
            byte_size=len(payload), child_mask=0, overflow=overflow,
        )
        self.offset += len(payload)
        self.nodes.append(node)
        self.stats.node_count += 1
        self.stats.max_level = max(self.stats.max_level, level)
        self.stats.total_points += len(pos)
        return len(self.nodes) - 1

    def _note_materialized(self, n_points: int) -> None:
        b = n_points * _BYTES_PER_POINT_INMEM
        if b > self.stats.peak_materialized_bytes:
            self.stats.peak_materialized_bytes = b

    # --- metadata -----------------------------------------------------------

    def _write_metadata(self) -> LodManifest:
        hierarchy = [n.to_json() for n in self.nodes]
        hier_bytes = json.dumps(hierarchy, separators=(",", ":")).encode()
        (self.out_dir / HIERARCHY_FILE).write_bytes(hier_bytes)
        digest = "sha256:" + hashlib.sha256(hier_bytes).hexdigest()
        manifest = LodManifest(
            version=1,
            bounds=self.root_bounds,
            root_spacing=self.root_spacing,
            total_points=self.stats.total_points,
            record=RECORD_LAYOUT,
            hierarchy_digest=digest,
            overflow_nodes=sorted(self.overflow),
        )
        data = json.dumps(manifest.to_json(), separators=(",", ":"),
                          ensure_ascii=False).encode()
        (self.out_dir / MANIFEST_FILE).write_bytes(data)
        return manifest


def _read_spill(path: Path, cfg: BuildConfig) -> Iterator[Chunk]:
    chunk = max(cfg.leaf_capacity, 4096)
    with open(path, "rb") as fh:
        while True:
            buf = fh.read(chunk * BINARY_DTYPE.itemsize)
            if not buf:
                return
            rec = np.frombuffer(buf, dtype=BINARY_DTYPE)
            pos = np.column_stack([rec["x"], rec["y"], rec["z"]])
            rgb = np.column_stack([rec["r"], rec["g"], rec["b"]])
            yield pos, rgb
