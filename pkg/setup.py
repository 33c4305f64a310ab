"""Build hook for the optional compiled trial kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time); building it just makes Monte-Carlo
heavy runs an order of magnitude faster.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/latsim/_kernel/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
except ImportError:  # Cython or numpy missing: install pure-Python only
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
