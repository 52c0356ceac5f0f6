"""Build script for the optional compiled kernels.

The package works without them; ``seminorm_lab._backend`` falls back to the
NumPy implementations when the extension is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SEMINORM_LAB_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "seminorm_lab._kernels",
                    ["src/seminorm_lab/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
