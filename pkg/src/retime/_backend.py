"""Kernel backend selection.

Prefers the compiled extension and falls back to the pure-numpy kernels when
it is unavailable.  Set ``RETIME_PURE_PYTHON=1`` to force the fallback.
"""

import os


def _load():
    if not os.environ.get("RETIME_PURE_PYTHON"):
        try:
            from . import _kernels
            return _kernels
        except ImportError:
            pass
    from . import _kernels_py
    return _kernels_py


kernels = _load()


def active_backend() -> str:
    """Name of the kernel backend in use: "compiled" or "python"."""
    return kernels.BACKEND_NAME
