"""Pure-Python minimum-spacing grid, API-identical to the Cython kernel."""

import math

import numpy as np


class PoissonGrid:
    """Incremental first-wins acceptance with a minimum Euclidean spacing.

    Cell edge equals the spacing, so any point closer than ``spacing`` to a
    candidate lives in the candidate's 3x3x3 cell neighborhood.
    """

    def __init__(self, spacing: float):
        if spacing <= 0:
            raise ValueError("spacing must be > 0")
        self.spacing = float(spacing)
        self._inv = 1.0 / self.spacing
        self._r2 = self.spacing * self.spacing
        self._cells: dict[tuple[int, int, int], list[int]] = {}
        self._xs: list[float] = []
        self._ys: list[float] = []
        self._zs: list[float] = []

    @property
    def point_count(self) -> int:
        return len(self._xs)

    @property
    def cell_count(self) -> int:
        return len(self._cells)

    def insert(self, pos: np.ndarray) -> np.ndarray:
        """Try to insert each row of ``pos`` (N, 3) in order.

        Returns a boolean mask of accepted rows. Accepted points become part
        of the grid and constrain later candidates (including within the
        same batch).
        """
        pos = np.ascontiguousarray(pos, dtype=np.float64)
        n = pos.shape[0]
        mask = np.zeros(n, dtype=bool)
        cells = self._cells
        xs, ys, zs = self._xs, self._ys, self._zs
        inv = self._inv
        r2 = self._r2
        floor = math.floor
        for i in range(n):
            x = pos[i, 0]
            y = pos[i, 1]
            z = pos[i, 2]
            ix = floor(x * inv)
            iy = floor(y * inv)
            iz = floor(z * inv)
            ok = True
            for cx in (ix - 1, ix, ix + 1):
                for cy in (iy - 1, iy, iy + 1):
                    for cz in (iz - 1, iz, iz + 1):
                        bucket = cells.get((cx, cy, cz))
                        if bucket is None:
                            continue
                        for j in bucket:
                            dx = xs[j] - x
                            dy = ys[j] - y
                            dz = zs[j] - z
                            if dx * dx + dy * dy + dz * dz < r2:
                                ok = False
                                break
                        if not ok:
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                j = len(xs)
                xs.append(x)
                ys.append(y)
                zs.append(z)
                cells.setdefault((ix, iy, iz), []).append(j)
                mask[i] = True
        return mask
