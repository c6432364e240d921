"""Build script: compiles the optional Cython game-solver core.

The package works without the extension (a pure-Python backend is selected
at import time), so a failed compile only costs speed, never functionality.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DWLAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "dwlab.kernels._core",
                    ["src/dwlab/kernels/_core.pyx"],
                    language="c++",
                    extra_compile_args=["-O2"],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # pragma: no cover - build-env dependent
        print(f"dwlab: skipping compiled kernels ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
