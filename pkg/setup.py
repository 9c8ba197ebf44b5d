"""Build hook for the optional compiled Monte Carlo kernel.

The package works without the extension; montecarlo falls back to the
pure-Python backend when the import fails.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension("faraday_ecp._mc_kernel", ["src/faraday_ecp/_mc_kernel.pyx"]),
]

setup(
    ext_modules=cythonize(extensions, language_level="3") if cythonize else [],
)
