"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a NumPy/pure-Python
backend is selected at import time); building it just makes the pixel
kernels fast.  `pip install -e . --no-build-isolation` compiles it when a
C toolchain and Cython are present.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "minutia._kernels._speedups",
                ["src/minutia/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
