"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure to cythonize or compile downgrades
to a pure-Python build instead of aborting the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sphereot._fastcore",
                ["src/sphereot/_fastcore.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-fno-math-errno"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"sphereot: skipping compiled extension ({exc}); using pure-Python kernels")

setup(ext_modules=ext_modules)
