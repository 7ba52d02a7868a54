"""Select the compiled inner loops, falling back to pure Python.

Set ``POWERVOLTERRA_PURE=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_compiled = None

if os.environ.get("POWERVOLTERRA_PURE", "") in ("", "0"):
    try:
        from . import _kernels as _compiled

        BACKEND = "cython"
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _fallback

KIND_CODES = {"const": 0, "expconv": 1, "power": 2}

midpoint_solve_builtin = _impl.midpoint_solve_builtin
midpoint_solve_rows = _impl.midpoint_solve_rows
simulate_recurrence = _impl.simulate_recurrence


def backends():
    """Map of available backend name to implementation module."""
    out = {"python": _fallback}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
