"""Build shim: compiles the Cython kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so build failures here are tolerated by installing with the
extension skipped rather than failing the whole install.
"""

import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = cythonize(
    [
        Extension(
            "gaussfade._kernels._core",
            ["src/gaussfade/_kernels/_core.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
    ],
    language_level=3,
)

setup(ext_modules=extensions)
