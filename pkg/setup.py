"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a pure numpy fallback is selected
at import time), so a missing compiler or Cython must not fail the install.
"""
import os

from setuptools import setup

PYX = "src/bohrlab/_kernels/_core.pyx"

ext_modules = []
if os.environ.get("BOHR_LAB_NO_EXT", "") != "1" and os.path.exists(PYX):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "bohrlab._kernels._core",
                    [PYX],
                    include_dirs=[numpy.get_include()],
                    # -ffp-contract=off: keep the float accumulation order
                    # identical to the pure fallback (no FMA fusion)
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
