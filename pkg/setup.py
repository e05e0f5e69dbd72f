from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [Extension("krden._kernels", ["src/krden/_kernels.pyx"])]

setup(ext_modules=cythonize(extensions, language_level=3))
