"""Build the optional compiled geometry core.

The package works without the extension (a pure-NumPy fallback is selected at
import time), so a missing compiler or Cython must not fail the install.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "spheregen.geometry._core",
                sources=["src/spheregen/geometry/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
