"""Build script: compiles the rule-sweep kernel as a C extension when possible.

The package works without the extension (heliplan.engine falls back to the
pure-Python kernel), so a failed compile only costs speed.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            print(f"warning: extension build skipped ({exc}); pure-Python kernel will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} build failed ({exc}); pure-Python kernel will be used")


ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "heliplan._sweep_cy",
                ["src/heliplan/_sweep_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    print("warning: Cython or numpy not available; pure-Python kernel will be used")

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": OptionalBuildExt},
)
