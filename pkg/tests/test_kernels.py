import numpy as np
import pytest

from labtwin.kernels import KERNEL, PoissonGrid
from labtwin.kernels._poisson_py import PoissonGrid as PyGrid

from .oracles import min_pairwise_distance


def test_active_kernel_reported():
    assert KERNEL in ("cython", "python")


def test_first_point_always_kept():
    g = PoissonGrid(1.0)
    mask = g.insert(np.zeros((1, 3)))
    assert mask.tolist() == [True]
    assert g.point_count == 1


def test_exact_spacing_is_kept():
    # rejection is strict: distance exactly == spacing passes
    g = PoissonGrid(1.0)
    mask = g.insert(np.array([[0.0, 0, 0], [1.0, 0, 0], [0.5, 0, 0]]))
    assert mask.tolist() == [True, True, False]


def test_first_wins_in_stream_order():
    g = PoissonGrid(1.0)
    pts = np.array([[0.0, 0, 0], [0.2, 0, 0], [0.4, 0, 0], [5.0, 0, 0]])
    assert g.insert(pts).tolist() == [True, False, False, True]


def test_incremental_matches_single_batch(rng):
    pts = rng.uniform(-3, 3, size=(4000, 3))
    whole = PoissonGrid(0.4).insert(pts)
    g = PoissonGrid(0.4)
    parts = np.concatenate([g.insert(pts[i:i + 123])
                            for i in range(0, len(pts), 123)])
    assert np.array_equal(whole, parts)


def test_negative_coordinates(rng):
    pts = rng.uniform(-100, -90, size=(2000, 3))
    g = PoissonGrid(0.5)
    kept = pts[g.insert(pts)]
    assert min_pairwise_distance(kept) >= 0.5


def test_matches_pure_python_bitwise(rng):
    pts = rng.uniform(0, 10, size=(5000, 3))
    a = PoissonGrid(0.3).insert(pts)
    b = PyGrid(0.3).insert(pts)
    assert np.array_equal(a, b)


def test_min_distance_oracle(rng):
    pts = rng.uniform(0, 2, size=(1500, 3))
    g = PoissonGrid(0.25)
    mask = g.insert(pts)
    kept = pts[mask]
    assert min_pairwise_distance(kept) >= 0.25
    # every rejected point is justified by a kept point within spacing
    for p in pts[~mask]:
        assert np.linalg.norm(kept - p, axis=1).min() < 0.25


def test_cell_count_grows():
    g = PoissonGrid(1.0)
    g.insert(np.array([[0.0, 0, 0], [10.0, 0, 0]]))
    assert g.cell_count == 2


def test_invalid_spacing():
    with pytest.raises(Exception):
        PoissonGrid(0.0)
