"""Build script: compiles the optional satisfaction kernel.

The compiled extension is a pure accelerator; if Cython or a C compiler is
unavailable the build falls back to the interpreted evaluator and the
installed package behaves identically (see keislerlab.engine).
Set KEISLERLAB_PURE=1 to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernel ({exc}); using pure-Python evaluator")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to compile {ext.name} ({exc}); using pure-Python evaluator")


def extensions():
    if os.environ.get("KEISLERLAB_PURE", "") not in ("", "0"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not available; building without the compiled kernel")
        return []
    return cythonize(
        [Extension("keislerlab._satcore", ["src/keislerlab/_satcore.pyx"])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
