"""Build script: compiles the optional row-reduction extension.

The package works without the extension (a numpy fallback is selected
at import), so a failed compile only warns.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as err:
            self._warn(err)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as err:
            self._warn(err)

    @staticmethod
    def _warn(err):
        print(f"warning: skipping compiled kernel ({err}); "
              "the pure-Python fallback will be used", file=sys.stderr)


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython unavailable; building without the compiled "
              "kernel", file=sys.stderr)
        return []
    return cythonize(
        [Extension("loopinv._rowred", ["src/loopinv/_rowred.pyx"])],
        language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
