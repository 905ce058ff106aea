"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``RAYSEP_PURE=1`` to force
the numpy implementation.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

EXP = _kernels_py.EXP
QUAD = _kernels_py.QUAD

_compiled = None
if os.environ.get("RAYSEP_PURE") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = "cython" if _compiled is not None else "numpy"

escape_time = _impl.escape_time
recurrence = _impl.recurrence
newton = _impl.newton
crossing_parity = _impl.crossing_parity
polyline_distance = _impl.polyline_distance


def backends():
    """Map of available backend name to module, compiled first."""
    out = {}
    if _compiled is not None:
        out["cython"] = _compiled
    out["numpy"] = _kernels_py
    return out
