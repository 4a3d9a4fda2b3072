"""Build script.

The compiled row-reduction kernel is optional: if Cython (or a C compiler)
is unavailable the package installs pure-Python only and intres.exactla
falls back to its interpreted kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "intres._speedups",
                ["src/intres/_speedups.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - exercised only on bare installs
    print(f"intres: building without compiled speedups ({exc})")

setup(ext_modules=ext_modules)
