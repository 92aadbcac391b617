import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "divmax._closure",
                ["src/divmax/_closure.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The package falls back to the numpy implementation at import time.
    extensions = []

setup(ext_modules=extensions)
