"""Build script for the compiled metric-accumulation kernel.

The extension is optional: if Cython or a C compiler is unavailable the
package installs anyway and promptseg.metrics falls back to the NumPy
kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/promptseg/metrics/_accum_cy.pyx",
        language_level=3,
        annotate=False,
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.extra_compile_args = ["-O3"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
