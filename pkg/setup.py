import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("LIFSHITZ_NO_EXTENSION"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("lifshitz._kernel", ["src/lifshitz/_kernel.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
