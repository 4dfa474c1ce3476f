"""Build the optional Cython kernels.

The package runs without them: ``playmaking.kernels`` falls back to a numpy
implementation when the compiled module cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PLAYMAKING_NO_EXT"):
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
                    "playmaking._ckernels",
                    ["src/playmaking/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
