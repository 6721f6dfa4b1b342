"""Backend selection for the hot state-vector kernels.

The compiled extension is used when it imports; setting the environment
variable ``QUDITSIM_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("QUDITSIM_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels_ext as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

apply_matrix = _impl.apply_matrix
marginals = _impl.marginals


def available_backends():
    """Map of backend name to kernel module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels_ext

        out["cython"] = _kernels_ext
    except ImportError:
        pass
    return out
