"""Backend selection for the Gauss-Seidel kernels.

The compiled extension is used when it was built; otherwise the pure-Python
module is loaded. Set ``CURVEMAC_BACKEND=python`` to force the fallback.
"""

import os

BACKEND = "python"
if os.environ.get("CURVEMAC_BACKEND", "").lower() != "python":
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = None
else:
    _impl = None

if _impl is None:
    from . import _pycore as _impl

gauss_seidel_9pt = _impl.gauss_seidel_9pt
residual_9pt = _impl.residual_9pt
smooth_grid = _impl.smooth_grid


def backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        from . import _pycore

        return _pycore
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
