"""Build script for the optional compiled similarity kernel.

The package is pure Python; ``bomdiff._jaro_cy`` is a Cython-compiled twin of
``bomdiff._jaro_py`` that speeds up all-pairs fuzzy matching. If Cython or a C
compiler is unavailable the extension is skipped and the pure-Python kernel is
used at runtime.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class optional_build_ext(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            warnings.warn(f"skipping compiled kernel, using pure-Python fallback: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name}, using pure-Python fallback: {exc}")


ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("bomdiff._jaro_cy", ["src/bomdiff/_jaro_cy.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
