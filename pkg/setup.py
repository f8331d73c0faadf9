from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "lipsplit._core",
                ["src/lipsplit/_core.pyx"],
                # -ffp-contract=off keeps the compiled engine bit-identical to
                # the pure-Python one (no FMA contraction of a*b-c).
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
