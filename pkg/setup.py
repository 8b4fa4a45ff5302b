"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: rotorb.kernels falls
back to the vectorized pure-Python implementation when rotorb._kernels is
missing.  `python setup.py build_ext --inplace` rebuilds it in a checkout.
"""

import os

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    if not os.path.exists("src/rotorb/_kernels.pyx"):
        raise ImportError
    ext_modules = cythonize(
        [
            Extension(
                "rotorb._kernels",
                ["src/rotorb/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                language="c++",
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
