"""Build script: compiles the hot-loop kernels to a C extension when a
toolchain is available, and falls back to the pure-Python implementation
otherwise (the package selects at import time)."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/offshell_gf/_kernels.pyx"],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs = [numpy.get_include()]
        ext.extra_compile_args = ["-O3"]
except Exception as exc:  # pragma: no cover - toolchain-dependent
    sys.stderr.write(f"warning: compiled kernels skipped ({exc}); "
                     "pure-Python backend will be used\n")
    ext_modules = []

setup(ext_modules=ext_modules)
