"""Build hook: compile the hot-loop kernels when Cython is available.

The package is fully functional without the extension; _backend falls back to
the numpy implementations. Building is best-effort on purpose so that a plain
`pip install .` never fails on a machine without a C toolchain.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/onesided/_kernels.pyx"],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # missing Cython/compiler: fall back to pure python
    print(f"onesided: building without compiled kernels ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
