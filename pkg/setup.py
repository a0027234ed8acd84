import numpy as np
from setuptools import setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        "src/driftbeam/kernels/_core.pyx",
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    ),
    include_dirs=[np.get_include()],
)
