"""Build hook for the optional compiled propagation kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time); building it just makes large
constraint systems faster. `pip install -e . --no-build-isolation`
compiles it when Cython and a C compiler are available.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lmpa.kernel._speedups",
                ["src/lmpa/kernel/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
