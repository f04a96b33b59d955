"""Build the optional compiled kernel; the package works without it."""
from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("acmoduli._reduce", ["src/acmoduli/_reduce.pyx"], language="c++")],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
