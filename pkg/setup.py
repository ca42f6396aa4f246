import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "frilab._kernels",
        ["src/frilab/_kernels.pyx"],
        include_dirs=[np.get_include()],
        # keep IEEE semantics identical to the pure-Python fallback
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
