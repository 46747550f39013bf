"""Build script: compiles the optional Whitney-form assembly kernel.

The package works without the extension (a vectorized numpy fallback is
selected at import time); building it just makes mass-matrix assembly faster
on large meshes.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "conelab._whitney_cy",
                ["src/conelab/_whitney_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
