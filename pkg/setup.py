"""Build script for the compiled pair-sum kernels.

The extension is optional: if Cython or a C compiler is unavailable the
package falls back to the numpy kernels at import time.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "fraceig._kernels._corecy",
        ["src/fraceig/_kernels/_corecy.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
