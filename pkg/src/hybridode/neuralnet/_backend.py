"""Kernel backend selection.

The compiled Cython kernels are preferred; the pure numpy fallback is
used when the extension is unavailable or HYBRIDODE_PURE_PYTHON is set.
Both expose the same functions: sigmoid, forward, forward_cached,
backprop, dataset_sse.
"""

import os

from . import _py_kernels

if os.environ.get("HYBRIDODE_PURE_PYTHON"):
    kernels = _py_kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        kernels = _py_kernels
        BACKEND = "python"
