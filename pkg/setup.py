from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython available: install pure-Python only; relcube.kernels falls
    # back to the numpy implementation at import time.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "relcube._kernels",
                ["src/relcube/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
