"""Build script for the optional compiled kernel core.

The package is fully functional without the extension (a pure-NumPy
twin is selected at import time), so a failed compile must not fail
the install.
"""

import os

from setuptools import setup

_PYX = "src/swiptbeam/conic/kernels/_core.pyx"

ext_modules = []
try:
    if not os.path.exists(_PYX):
        raise ImportError
    from Cython.Build import cythonize
    from setuptools import Extension
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "swiptbeam.conic.kernels._core",
                [_PYX],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
