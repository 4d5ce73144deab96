import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        Extension(
            "wosqmc._kernels",
            ["src/wosqmc/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
        language_level=3,
    )
except ImportError:
    # pure-python fallback still works without the extension
    ext_modules = []

setup(ext_modules=ext_modules)
