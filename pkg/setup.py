import os
import sys

from setuptools import setup

# The compiled kernel is optional: everything works (more slowly) through the
# pure-python backend.  Set PIERBEAM_NO_EXT=1 to skip the build explicitly.
ext_modules = []
if not os.environ.get("PIERBEAM_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "pierbeam.backends._core",
                    ["src/pierbeam/backends/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # pragma: no cover - build-environment dependent
        sys.stderr.write(
            "pierbeam: skipping compiled kernel (%s); the python backend will be used\n" % exc
        )
        ext_modules = []

setup(ext_modules=ext_modules)
