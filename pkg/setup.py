"""Build script: compiles the hot stepping kernels when Cython and a C
compiler are available.  The package falls back to the pure-Python kernels
at import time if the extension is missing, so a plain-Python install still
works (slowly)."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stefanctl._kernels",
                ["src/stefanctl/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
