"""Distance-based downsampling to a minimum point spacing.

Occupancy-grid rejection: a candidate is kept iff no already-kept point lies
within ``spacing``. First point in stream order wins, so the result is
deterministic and the kept set is a subset of the input (no averaging).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .cloud_io import Chunk, PointCloud, cloud_chunks
from .errors import ResourceError, ValidationError
from .kernels import PoissonGrid

DEFAULT_SPACING = 0.005  # meters


@dataclass(frozen=True)
class SubsampleConfig:
    spacing: float = DEFAULT_SPACING
    cell_hash_budget: int = 200_000_000

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValidationError("spacing must be > 0")
        if self.cell_hash_budget <= 0:
            raise ValidationError("cell_hash_budget must be > 0")


@dataclass
class SubsampleStats:
    kept: int = 0
    dropped: int = 0


def subsample(chunks: Iterable[Chunk], cfg: SubsampleConfig,
              stats: SubsampleStats | None = None) -> Iterator[Chunk]:
    """Filter a chunk stream so all emitted points are >= spacing apart."""
    if stats is None:
        stats = SubsampleStats()
    grid = PoissonGrid(cfg.spacing)
    for pos, rgb in chunks:
        pos = np.ascontiguousarray(pos, dtype=np.float64)
        if not np.isfinite(pos).all():
            raise ValidationError("non-finite coordinate in subsample input")
        mask = grid.insert(pos)
        if grid.cell_count > cfg.cell_hash_budget:
            raise ResourceError(
                f"occupancy cells ({grid.cell_count}) exceed "
                f"cell_hash_budget ({cfg.cell_hash_budget})")
        stats.kept += int(mask.sum())
        stats.dropped += int(len(pos) - mask.sum())
        yield pos[mask], rgb[mask]


def subsample_cloud(cloud: PointCloud, cfg: SubsampleConfig) -> tuple[PointCloud, SubsampleStats]:
    stats = SubsampleStats()
    parts = list(subsample(cloud_chunks(cloud), cfg, stats))
    if not parts or stats.kept == 0:
        return PointCloud.from_arrays(np.empty((0, 3)), np.empty((0, 3), np.uint8)), stats
    pos = np.concatenate([p for p, _ in parts])
    rgb = np.concatenate([c for _, c in parts])
    return PointCloud.from_arrays(pos, rgb), stats
