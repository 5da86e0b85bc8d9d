"""Build script: compiles the optional Cython acceptance kernel.

If Cython or a C compiler is unavailable the install still succeeds and the
package falls back to the pure-Python kernel at import time.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "labtwin.kernels._poisson_cy",
                ["src/labtwin/kernels/_poisson_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    sys.stderr.write(f"labtwin: building without compiled kernel ({exc})\n")

setup(ext_modules=ext_modules)
