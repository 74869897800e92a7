import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("FLOQUET_ELM_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "floquet_elm.physics._fdtd_core",
                ["src/floquet_elm/physics/_fdtd_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
