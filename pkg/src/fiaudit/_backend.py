"""Select the tree-kernel implementation at import time.

The compiled ``_kernels_c`` extension is preferred. Setting the environment
variable ``FIAUDIT_PURE_PYTHON=1`` forces the numpy fallback, which is also used
automatically when the extension was not built.
"""
import os

if os.environ.get("FIAUDIT_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels_c as kernels

        BACKEND = "cython"
    except ImportError:  # extension not compiled
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
