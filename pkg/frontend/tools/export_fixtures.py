#!/usr/bin/env python3
"""Regenerate the viewer test fixtures from the Python pipeline.

Produces, under frontend/tests/fixtures/:
  - scene.json        demo scene exactly as /api/scene serves it
  - manifest.json     LOD manifest of a small demo build
  - hierarchy.json    matching node index
  - selections.json   20 fixed camera poses with the server-side node
                      selection for each (the differential-test oracle)
  - guidance.json     spot-check guidance payloads for fixed positions

Run from the repository root:  python3 frontend/tools/export_fixtures.py
"""

import json
import shutil
import tempfile
from pathlib import Path

import numpy as np

from labtwin.cloud_io import cloud_chunks, synth_cloud
from labtwin.engine import CameraPose, SessionState, start_escape
from labtwin.octree.build import BuildConfig, build_octree
from labtwin.octree.model import CameraView
from labtwin.octree.select import select_nodes
from labtwin.octree.storage import load_hierarchy
from labtwin.scene import demo_scene, save_scene

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    save_scene(demo_scene(), OUT / "scene.json")

    tmp = Path(tempfile.mkdtemp(prefix="labtwin-fixtures-"))
    try:
        cloud = synth_cloud("room-with-aisles", 120_000, seed=31)
        build_octree(cloud_chunks(cloud), cloud.bounds,
                     BuildConfig(root_spacing=4.0), tmp)
        shutil.copy(tmp / "manifest.json", OUT / "manifest.json")
        shutil.copy(tmp / "hierarchy.json", OUT / "hierarchy.json")
        manifest, nodes = load_hierarchy(tmp)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)

    rng = np.random.default_rng(2024)
    poses = []
    for i in range(20):
        pos = rng.uniform(manifest.bounds.min - 5, manifest.bounds.max + 5)
        yaw = float(rng.uniform(0, 2 * np.pi))
        pitch = float(rng.uniform(-1.2, 1.2))
        fwd = [float(np.cos(pitch) * np.sin(yaw)),
               float(np.cos(pitch) * np.cos(yaw)), float(np.sin(pitch))]
        budget = int(rng.integers(20_000, 120_000))
        view = CameraView(position=pos, forward=np.array(fwd),
                          up=np.array([0.0, 0.0, 1.0]))
        sel = select_nodes(nodes, view, budget)
        poses.append({
            "position": [float(v) for v in pos],
            "forward": fwd,
            "budget": budget,
            "expected_nodes": sel.node_names,
            "expected_points": sel.total_points_selected,
        })
    (OUT / "selections.json").write_text(
        json.dumps(poses, indent=2) + "\n")

    scene = demo_scene()
    checks = []
    for p in [(12.0, 0.5, 1.7), (20.0, 50.0, 1.7), (35.0, 95.0, 1.7),
              (3.0, 5.0, 1.7)]:
        g = start_escape(SessionState(pose=CameraPose(p, 0.0, 0.0)),
                         scene).guidance
        checks.append({"position": list(p), "exit_id": g.exit_id,
                       "bearing_deg": g.bearing_deg,
                       "distance_m": g.distance_m, "arrived": g.arrived})
    (OUT / "guidance.json").write_text(json.dumps(checks, indent=2) + "\n")
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
