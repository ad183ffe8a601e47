"""Build script: compiles the optional Cython kernel core.

The extension accelerates the hot loops (counter-based RNG streams,
rejection sampling, O(n^2) pair potentials).  If Cython or a C compiler
is unavailable the build falls back to a pure-Python install; the
package then selects the NumPy kernel backend at import time.

    pip install -e . --no-build-isolation
    python -m framestats.benchmark     # compare both backends
"""

import warnings

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/framestats/kernels/_native.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - depends on build host
    warnings.warn(f"Cython kernel build skipped ({exc}); "
                  "installing with the pure-Python backend only.")
    ext_modules = []

setup(ext_modules=ext_modules)
