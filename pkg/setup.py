from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the pure Python kernels are used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension(
            "eqwalk._kernels",
            ["src/eqwalk/_kernels.pyx"],
            language="c++",
            # no FMA contraction: the predicate must round like the Python fallback
            extra_compile_args=["-O2", "-ffp-contract=off"],
        )],
        language_level=3,
    )

setup(ext_modules=ext_modules)
