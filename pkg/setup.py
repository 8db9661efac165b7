import os

import numpy as np
from setuptools import Extension, setup

# GRAPHZOOM_NO_EXT=1 installs the pure-Python package only.
ext_modules = []
if not os.environ.get("GRAPHZOOM_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "graphzoom._core",
                ["src/graphzoom/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )

setup(ext_modules=ext_modules)
