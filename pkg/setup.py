"""Build the compiled simulated-annealing kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), but paper-scale sweeps are impractical without it.
"""
import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "trcopt._sa_core",
        ["src/trcopt/_sa_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
