"""Build script for the optional compiled kernels.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a missing Cython toolchain only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "retime._kernels",
                ["src/retime/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
