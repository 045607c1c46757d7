import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PARABOLIC_MAX_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "parabolic_max._kernels",
                    ["src/parabolic_max/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # no contraction or fast-math: results must match the numpy fallback
                    extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
