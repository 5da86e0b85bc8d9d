from __future__ import annotations

import numpy as np
import pytest

from labtwin.cloud_io import synth_cloud
from labtwin.octree.build import BuildConfig, BuildStats, build_octree
from labtwin.octree.storage import load_hierarchy
from labtwin.scene import demo_scene, save_scene
from labtwin.subsample import SubsampleConfig, subsample_cloud


@pytest.fixture(scope="session")
def room_cloud():
    """Synthetic lab room, subsampled to 2 cm so builds stay fast."""
    cloud = synth_cloud("room-with-aisles", 300_000, seed=7)
    smaller, _ = subsample_cloud(cloud, SubsampleConfig(spacing=0.02))
    return smaller


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory, room_cloud):
    out = tmp_path_factory.mktemp("dataset")
    from labtwin.cloud_io import cloud_chunks

    stats = BuildStats()
    build_octree(cloud_chunks(room_cloud), room_cloud.bounds,
                 BuildConfig(root_spacing=2.0, max_level=8), out, stats)
    return out


@pytest.fixture(scope="session")
def dataset(dataset_dir):
    return load_hierarchy(dataset_dir)


@pytest.fixture(scope="session")
def scene():
    return demo_scene()


@pytest.fixture(scope="session")
def scene_file(tmp_path_factory, scene):
    path = tmp_path_factory.mktemp("scene") / "scene.json"
    save_scene(scene, path)
    return path


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
