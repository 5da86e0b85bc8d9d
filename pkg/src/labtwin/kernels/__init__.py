"""Minimum-spacing acceptance kernel, compiled when available.

``PoissonGrid`` is the hot inner loop shared by the subsampler and the
octree builder. The Cython extension is preferred; set ``LABTWIN_PURE=1``
to force the pure-Python fallback (used by the benchmark and CI without a
compiler).
"""

import os

if os.environ.get("LABTWIN_PURE"):
    from ._poisson_py import PoissonGrid

    KERNEL = "python"
else:
    try:
        from ._poisson_cy import PoissonGrid  # type: ignore[no-redef]

        KERNEL = "cython"
    except ImportError:
        from ._poisson_py import PoissonGrid  # type: ignore[no-redef]

        KERNEL = "python"

__all__ = ["PoissonGrid", "KERNEL"]
