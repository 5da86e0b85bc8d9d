import numpy as np
import pytest

from labtwin.cloud_io import PointCloud, synth_cloud
from labtwin.errors import ResourceError, ValidationError
from labtwin.subsample import (DEFAULT_SPACING, SubsampleConfig,
                               SubsampleStats, subsample, subsample_cloud)

from .oracles import every_dropped_near_kept, min_pairwise_distance


def test_default_spacing_is_5mm():
    assert SubsampleConfig().spacing == DEFAULT_SPACING == 0.005


def test_min_distance_postcondition(rng):
    pos = rng.uniform(0, 1, size=(3000, 3))
    cloud = PointCloud.from_arrays(pos, np.zeros((3000, 3), np.uint8))
    out, stats = subsample_cloud(cloud, SubsampleConfig(spacing=0.08))
    assert stats.kept + stats.dropped == 3000
    assert out.count == stats.kept
    assert min_pairwise_distance(out.positions) >= 0.08
    dropped = np.array([p for p in pos
                        if not (out.positions == p).all(axis=1).any()])
    assert every_dropped_near_kept(out.positions, dropped, 0.08)


def test_output_is_subset_in_order(rng):
    pos = rng.uniform(0, 1, size=(500, 3))
    rgb = rng.integers(0, 256, size=(500, 3), dtype=np.uint8)
    cloud = PointCloud.from_arrays(pos, rgb)
    out, _ = subsample_cloud(cloud, SubsampleConfig(spacing=0.1))
    idx = [int(np.flatnonzero((pos == p).all(axis=1))[0])
           for p in out.positions]
    assert idx == sorted(idx)
    assert all(np.array_equal(out.colors[i], rgb[j])
               for i, j in enumerate(idx))


def test_idempotent(rng):
    cloud = synth_cloud("box", 5000, seed=3)
    once, _ = subsample_cloud(cloud, SubsampleConfig(spacing=0.3))
    twice, stats = subsample_cloud(once, SubsampleConfig(spacing=0.3))
    assert stats.dropped == 0
    assert np.array_equal(once.positions, twice.positions)


def test_chunking_invariance(rng):
    pos = rng.uniform(0, 2, size=(2000, 3))
    rgb = np.zeros((2000, 3), np.uint8)
    whole = list(subsample([(pos, rgb)], SubsampleConfig(spacing=0.1)))
    split = list(subsample([(pos[:777], rgb[:777]), (pos[777:], rgb[777:])],
                           SubsampleConfig(spacing=0.1)))
    a = np.concatenate([p for p, _ in whole])
    b = np.concatenate([p for p, _ in split])
    assert np.array_equal(a, b)


def test_non_finite_input_rejected():
    pos = np.array([[0.0, 0, 0], [np.inf, 0, 0]])
    with pytest.raises(ValidationError):
        list(subsample([(pos, np.zeros((2, 3), np.uint8))], SubsampleConfig()))


def test_cell_budget_exhaustion(rng):
    pos = rng.uniform(0, 100, size=(5000, 3))
    cfg = SubsampleConfig(spacing=0.001, cell_hash_budget=10)
    with pytest.raises(ResourceError):
        list(subsample([(pos, np.zeros((5000, 3), np.uint8))], cfg))


def test_invalid_config():
    with pytest.raises(ValidationError):
        SubsampleConfig(spacing=0.0)
    with pytest.raises(ValidationError):
        SubsampleConfig(cell_hash_budget=0)


def test_empty_cloud():
    empty = PointCloud.from_arrays(np.empty((0, 3)), np.empty((0, 3), np.uint8))
    out, stats = subsample_cloud(empty, SubsampleConfig())
    assert out.count == 0 and stats.kept == 0
