"""Build script: compiles the Cython fast path when a toolchain is present.

The compiled module is optional.  If cythonization or compilation fails the
package installs anyway and falls back to the pure numpy kernels at import
time (see heatgeo._kernels).
"""
import warnings

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; building without compiled kernels")
        return []
    ext = Extension(
        "heatgeo._kernels._speedups",
        ["src/heatgeo/_kernels/_speedups.pyx"],
        extra_compile_args=["-O3"],
    )
    try:
        return cythonize([ext], language_level="3")
    except Exception as exc:  # pragma: no cover
        warnings.warn(f"cythonize failed ({exc}); building without compiled kernels")
        return []


setup(ext_modules=_extensions())
