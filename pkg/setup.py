"""Build script: compiles the optional accelerator extension.

The package works without the extension (a pure NumPy/Python fallback is
selected at import time), so a failed native build degrades to a warning
instead of aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

try:
    import numpy as np
except ImportError:
    np = None


class optional_build_ext(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the topokernel._core accelerator failed "
            f"({exc!r}); falling back to the pure-Python backend.",
            file=sys.stderr,
        )


ext_modules = []
if cythonize is not None and np is not None:
    ext_modules = cythonize(
        [
            Extension(
                "topokernel._core",
                ["src/topokernel/_core.pyx"],
                language="c++",
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
