"""Build the optional compiled kernel extension.

The package works without it (numpy fallback selected at import time),
so a failed compile downgrades to a warning instead of aborting install.
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "selinet._kernels_c",
                ["src/selinet/_kernels_c.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover
    print(f"selinet: compiled kernels disabled ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
