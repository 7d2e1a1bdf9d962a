"""Build hook for the optional compiled chain core.

The package is pure Python plus one Cython extension for the Markov-chain
stepping loop.  If Cython (or a C compiler) is unavailable the build falls
back to the pure-Python core transparently; set TWOCHARGE_NO_EXT=1 to skip
the extension on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TWOCHARGE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "twocharge._chain",
                    ["src/twocharge/_chain.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
