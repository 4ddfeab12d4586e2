"""Build script for the compiled kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a failed Cython build is tolerated with a warning.
"""

import warnings

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/reluflow/kernels/_fastloops.pyx",
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    warnings.warn(f"Cython unavailable, building without compiled kernels: {exc}")
    ext_modules = []

setup(ext_modules=ext_modules, include_dirs=[np.get_include()])
