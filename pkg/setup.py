"""Build script: compiles the optional kernel extension when Cython is available.

Set RATECAST_PURE_PYTHON=1 to skip the extension entirely; the package then
runs on the numpy fallback kernels.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("RATECAST_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ratecast._kernels._ckernels",
                    ["src/ratecast/_kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
