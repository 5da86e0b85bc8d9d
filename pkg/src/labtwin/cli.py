"""Operator CLI: convert, subsample, build, validate, tour, replay, serve.

Exit codes: 0 success, 1 validation failure, 2 resource/I-O failure.
"""

from __future__ import annotations

import csv
import logging
import os
import re
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .cloud_io import load_cloud, read_cloud, write_cloud
from .engine import CameraPose, SessionState, start_tour, step_tour
from .errors import ResourceError, ValidationError
from .kernels import PoissonGrid
from .octree.build import BuildStats, build_octree
from .octree.model import BuildConfig, CameraView
from .octree.select import select_nodes
from .octree.storage import load_hierarchy, read_node_points
from .path import build_tour_path
from .replay import replay_log, state_hash
from .scene import load_scene, validate_scene
from .subsample import SubsampleConfig, SubsampleStats, subsample

_SUFFIX_FORMATS = {".txt": "xyzrgb-text", ".xyz": "xyzrgb-text",
                   ".xyzrgb": "xyzrgb-text", ".las": "las",
                   ".bin": "internal-binary", ".ltpc": "internal-binary"}


def _infer_format(path: str, declared: str) -> str:
    if declared != "auto":
        return declared
    fmt = _SUFFIX_FORMATS.get(Path(path).suffix.lower())
    if fmt is None:
        raise ValidationError(
            f"cannot infer cloud format from {path!r}; pass an explicit format")
    return fmt


def _parse_bytes(text: str) -> int:
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([KMGT]i?B?|B)?\s*", text, re.I)
    if not m:
        raise ValidationError(f"cannot parse byte size {text!r}")
    value = float(m.group(1))
    unit = (m.group(2) or "B").upper().rstrip("B")
    scale = {"": 1, "K": 1024, "KI": 1024, "M": 1024**2, "MI": 1024**2,
             "G": 1024**3, "GI": 1024**3, "T": 1024**4, "TI": 1024**4}[unit]
    return int(value * scale)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Point-cloud virtual laboratory toolkit."""
    level = os.environ.get("LABTWIN_LOG", "info").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2 if isinstance(exc, (ResourceError, OSError)) else 1)


@main.command()
@click.option("--in", "in_path", required=True)
@click.option("--in-format", default="auto",
              type=click.Choice(["auto", "xyzrgb-text", "las", "internal-binary"]))
@click.option("--out", "out_path", required=True)
@click.option("--out-format", default="auto",
              type=click.Choice(["auto", "xyzrgb-text", "las", "internal-binary"]))
def convert(in_path, in_format, out_path, out_format):
    """Convert a point cloud between supported formats (streaming)."""
    try:
        src = read_cloud(in_path, _infer_format(in_path, in_format))
        count = write_cloud(iter(src), out_path, _infer_format(out_path, out_format))
        b = src.bounds
        click.echo(f"wrote {count} points to {out_path}")
        if b is not None:
            click.echo(f"bounds min {b.min.tolist()} max {b.max.tolist()}")
    except (ValidationError, ResourceError) as exc:
        _fail(exc)


@main.command("subsample")
@click.option("--in", "in_path", required=True)
@click.option("--in-format", default="auto")
@click.option("--out", "out_path", required=True)
@click.option("--out-format", default="auto")
@click.option("--spacing", default=0.005, show_default=True,
              help="Minimum point spacing in meters.")
@click.option("--cell-budget", default=200_000_000, show_default=True)
def subsample_cmd(in_path, in_format, out_path, out_format, spacing, cell_budget):
    """Downsample so every kept pair of points is at least SPACING apart."""
    try:
        cfg = SubsampleConfig(spacing=spacing, cell_hash_budget=cell_budget)
        src = read_cloud(in_path, _infer_format(in_path, in_format))
        stats = SubsampleStats()
        write_cloud(subsample(iter(src), cfg, stats), out_path,
                    _infer_format(out_path, out_format))
        click.echo(f"kept {stats.kept} dropped {stats.dropped}")
    except (ValidationError, ResourceError) as exc:
        _fail(exc)


@main.command()
@click.option("--in", "in_path", required=True)
@click.option("--in-format", default="auto")
@click.option("--out", "out_dir", required=True)
@click.option("--root-spacing", default="auto", show_default=True)
@click.option("--leaf-capacity", default=20000, show_default=True)
@click.option("--max-level", default=12, show_default=True)
@click.option("--memory-budget", default="1GiB", show_default=True)
def build(in_path, in_format, out_dir, root_spacing, leaf_capacity, max_level,
          memory_budget):
    """Build the multi-level octree LOD dataset."""
    try:
        fmt = _infer_format(in_path, in_format)
        spacing = "auto" if root_spacing == "auto" else float(root_spacing)
        cfg = BuildConfig(root_spacing=spacing, max_level=max_level,
                          leaf_capacity=leaf_capacity,
                          memory_budget=_parse_bytes(memory_budget))
        probe = read_cloud(in_path, fmt)
        for _ in probe:
            pass
        if probe.count == 0:
            raise ValidationError(f"{in_path}: empty cloud")
        stats = BuildStats()
        build_octree(iter(read_cloud(in_path, fmt)), probe.bounds, cfg,
                     out_dir, stats)
        click.echo(f"nodes {stats.node_count} depth {stats.max_level} "
                   f"total points {stats.total_points}")
    except (ValidationError, ResourceError) as exc:
        _fail(exc)


@main.command()
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--scene", "scene_path", default=None)
@click.option("--source", default=None,
              help="Original cloud for the partition fingerprint check.")
@click.option("--source-format", default="auto")
@click.option("--audit-poisson", is_flag=True)
def validate(dataset_dir, scene_path, source, source_format, audit_poisson):
    """Integrity gate: digest, partition fingerprint, spacing audit, scene."""
    failed = False
    try:
        manifest, nodes = load_hierarchy(dataset_dir)
        click.echo(f"digest OK ({manifest.hierarchy_digest})")
        if source is not None:
            cloud = load_cloud(source, _infer_format(source, source_format))
            quant = manifest.bounds.min + (
                cloud.positions - manifest.bounds.min).astype(np.float32).astype(np.float64)
            want = (cloud.count, quant.sum(axis=0))
            got_count = 0
            got_sum = np.zeros(3)
            for n in nodes:
                pos, _ = read_node_points(dataset_dir, n.name, manifest, nodes)
                got_count += len(pos)
                got_sum += pos.sum(axis=0)
            if got_count != want[0] or not np.allclose(got_sum, want[1],
                                                       rtol=1e-9, atol=1e-6):
                click.echo(f"FAIL partition fingerprint: count {got_count} vs "
                           f"{want[0]}, axis sums {got_sum} vs {want[1]}")
                failed = True
            else:
                click.echo(f"partition fingerprint OK ({got_count} points)")
        if audit_poisson:
            for n in nodes:
                if n.overflow or n.num_points < 2:
                    continue
                pos, _ = read_node_points(dataset_dir, n.name, manifest, nodes)
                # exact check: a fresh grid accepts all points iff pairwise
                # >= spacing; allow slack for the f32 payload quantization
                quant_eps = 4.0 * float(manifest.bounds.size.max()) * 2.0**-23
                grid = PoissonGrid(max(n.spacing - quant_eps, n.spacing * 0.5))
                if not grid.insert(np.ascontiguousarray(pos)).all():
                    click.echo(f"FAIL spacing audit at node {n.name}")
                    failed = True
                    break
            else:
                click.echo("spacing audit OK")
        if scene_path is not None:
            scene = load_scene(scene_path)
            rep = validate_scene(scene, manifest.bounds)
            for w in rep.warnings:
                click.echo(f"scene warning: {w}")
            for e in rep.errors:
                click.echo(f"scene error: {e}")
                failed = True
            if rep.ok:
                click.echo("scene OK")
    except (ValidationError, ResourceError) as exc:
        _fail(exc)
    if failed:
        click.echo("FAIL")
        sys.exit(1)
    click.echo("PASS")


@main.command()
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--scene", "scene_path", required=True)
@click.option("--dt", default=0.1, show_default=True)
@click.option("--budget", default=500_000, show_default=True)
@click.option("--min-pixels", default=0.0, show_default=True)
@click.option("--report", "report_path", required=True)
def tour(dataset_dir, scene_path, dt, budget, min_pixels, report_path):
    """Headless auto-tour replay with LOD selection and first-touch bytes."""
    try:
        manifest, nodes = load_hierarchy(dataset_dir)
        scene = load_scene(scene_path)
        path = build_tour_path(scene)
        speed = scene.tour.speed_mps
        state = start_tour(SessionState(pose=CameraPose((0, 0, 0), 0, 0)), path)
        touched: set[str] = set()
        with open(report_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "z", "yaw", "pitch", "nodes_selected",
                        "points_selected", "new_bytes"])
            while True:
                pose = state.pose
                view = CameraView(position=np.array(pose.position),
                                  forward=pose.forward,
                                  up=np.array([0.0, 0.0, 1.0]))
                sel = select_nodes(nodes, view, budget, min_pixels)
                fresh = [n for n in sel.node_names if n not in touched]
                touched.update(fresh)
                by_name = {n.name: n for n in nodes}
                new_bytes = sum(by_name[n].byte_size for n in fresh)
                w.writerow([f"{state.clock:.3f}", f"{pose.position[0]:.4f}",
                            f"{pose.position[1]:.4f}", f"{pose.position[2]:.4f}",
                            f"{pose.yaw_deg:.3f}", f"{pose.pitch_deg:.3f}",
                            len(sel.node_names), sel.total_points_selected,
                            new_bytes])
                if state.mode != "tour":
                    break
                state = step_tour(state, dt, path, speed)
        click.echo(f"tour report written to {report_path}")
    except (ValidationError, ResourceError) as exc:
        _fail(exc)


@main.command()
@click.option("--dataset", "dataset_dir", default=None)
@click.option("--scene", "scene_path", required=True)
@click.option("--log", "log_path", required=True)
@click.option("--verify", is_flag=True)
@click.option("--start-waypoint", default=None,
              help="Initial pose waypoint id (default: first waypoint).")
def replay(dataset_dir, scene_path, log_path, verify, start_waypoint):
    """Replay a recorded input log; --verify checks the embedded state hash."""
    try:
        if dataset_dir is not None:
            load_hierarchy(dataset_dir)
        scene = load_scene(scene_path)
        wp = scene.waypoint(start_waypoint) if start_waypoint else scene.waypoints[0]
        initial = SessionState(pose=CameraPose(wp.position, wp.yaw_deg,
                                               wp.pitch_deg))
        final, digest = replay_log(log_path, scene, initial, verify=verify)
        click.echo(f"final mode {final.mode} clock {final.clock:.3f} "
                   f"hash {digest}")
        if verify:
            click.echo("hash verified")
    except (ValidationError, ResourceError) as exc:
        _fail(exc)


@main.command()
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--scene", "scene_path", required=True)
@click.option("--static", "static_dir", default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--no-cors", is_flag=True)
def serve(dataset_dir, scene_path, static_dir, host, port, no_cors):
    """Serve the dataset, scene, guidance API, and viewer assets."""
    from .server import ServerConfig, run_server

    try:
        run_server(ServerConfig(dataset_dir=dataset_dir, scene_path=scene_path,
                                static_dir=static_dir, cors=not no_cors),
                   host=host, port=port)
    except (ValidationError, ResourceError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
