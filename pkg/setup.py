import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("CURVEMAC_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "curvemac._core",
                ["src/curvemac/_core.pyx"],
                include_dirs=[np.get_include()],
                # keep IEEE semantics so results match the Python fallback bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
