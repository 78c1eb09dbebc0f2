"""Builds the optional compiled kernels; the package works without them."""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # no toolchain: install the pure-Python package only
    cythonize = None


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"gdforge: compiled kernels skipped ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"gdforge: failed to build {ext.name} ({exc})")


ext_modules = []
if cythonize is not None and not os.environ.get("GDFORGE_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension("gdforge._elim_c", ["src/gdforge/_elim_c.pyx"], extra_compile_args=["-O3"]),
            Extension(
                "gdforge._triple_c",
                ["src/gdforge/_triple_c.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            ),
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
