"""World-frame primitives: right-handed, Z-up, meters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box; ``min <= max`` componentwise."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "min", np.asarray(self.min, dtype=np.float64))
        object.__setattr__(self, "max", np.asarray(self.max, dtype=np.float64))
        if self.min.shape != (3,) or self.max.shape != (3,):
            raise ValueError("Aabb corners must be 3-vectors")
        if not (np.isfinite(self.min).all() and np.isfinite(self.max).all()):
            raise ValueError("Aabb corners must be finite")
        if (self.min > self.max).any():
            raise ValueError("Aabb min exceeds max")

    @property
    def size(self) -> np.ndarray:
        return self.max - self.min

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min + self.max)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.size))

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=np.float64)
        return bool((p >= self.min).all() and (p <= self.max).all())

    def cubified(self) -> "Aabb":
        """Expand to a cube sharing this box's min corner."""
        edge = float(self.size.max())
        return Aabb(self.min.copy(), self.min + edge)

    def octant(self, digit: int) -> "Aabb":
        """Child cube for octant ``digit`` = 4*(x hi) + 2*(y hi) + 1*(z hi)."""
        c = self.center
        lo = self.min.copy()
        hi = c.copy()
        for axis, bit in ((0, 4), (1, 2), (2, 1)):
            if digit & bit:
                lo[axis] = c[axis]
                hi[axis] = self.max[axis]
        return Aabb(lo, hi)

    def distance_to(self, p) -> float:
        """Euclidean distance from ``p`` to the box (0 inside)."""
        p = np.asarray(p, dtype=np.float64)
        d = np.maximum(np.maximum(self.min - p, p - self.max), 0.0)
        return float(np.linalg.norm(d))

    def to_json(self) -> dict:
        return {"min": [float(v) for v in self.min],
                "max": [float(v) for v in self.max]}

    @classmethod
    def from_json(cls, obj: dict) -> "Aabb":
        return cls(np.array(obj["min"], dtype=np.float64),
                   np.array(obj["max"], dtype=np.float64))

    @classmethod
    def of_points(cls, pos: np.ndarray) -> "Aabb":
        if len(pos) == 0:
            raise ValueError("empty point set has no bounds")
        return cls(pos.min(axis=0), pos.max(axis=0))


def octant_digits(pos: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Vectorized octant digit per row; points on a splitting plane go high."""
    hi = pos >= center
    return (hi[:, 0].astype(np.int8) * 4
            + hi[:, 1].astype(np.int8) * 2
            + hi[:, 2].astype(np.int8))


def normalize_deg(angle: float) -> float:
    """Wrap to [0, 360)."""
    return float(angle % 360.0)


def signed_deg(angle: float) -> float:
    """Wrap to (-180, 180]."""
    a = float(angle % 360.0)
    if a > 180.0:
        a -= 360.0
    return a
