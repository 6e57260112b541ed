"""Build script: compiles the optional hit-and-run Cython kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed. Build with
``pip install -e . --no-build-isolation``.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "displab.kernels._hitrun",
                ["src/displab/kernels/_hitrun.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        "displab: skipping Cython kernel build (%s); "
        "the pure-NumPy backend will be used.\n" % exc
    )

setup(ext_modules=ext_modules)
