"""Build script for the optional compiled eigensolver core.

The package works without the extension (a vectorized NumPy fallback is
selected at import time); building it just makes the hot rotation kernels
faster.  ``-ffp-contract=off`` keeps the compiled arithmetic aligned with the
NumPy fallback so the two backends agree to roundoff.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "specjm._jacobi_cy",
                ["src/specjm/_jacobi_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
