"""Build hook for the optional compiled kernels.

The package is pure Python plus one Cython extension holding the numeric
hot loops (value-iteration sweeps, SCC labeling).  If Cython or a C
compiler is unavailable the build still succeeds and the package falls
back to the numpy implementations in bpliveness._kernels.pure.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.path.exists("src/bpliveness/_kernels/_speedups.pyx"):
    ext_modules = cythonize(
        [
            Extension(
                "bpliveness._kernels._speedups",
                ["src/bpliveness/_kernels/_speedups.pyx"],
                # -ffp-contract=off keeps the float sequence identical to the
                # numpy fallback (no FMA contraction), so both kernels can be
                # compared bit-for-bit at a fixed sweep count.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
