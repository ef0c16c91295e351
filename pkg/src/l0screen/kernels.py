"""Select the relaxation kernel backend at import time.

The compiled extension is used when it imports; setting the environment
variable ``L0SCREEN_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

CONVERGED = _kernels_py.CONVERGED
ITERATION_LIMIT = _kernels_py.ITERATION_LIMIT
SCREEN_HIT = _kernels_py.SCREEN_HIT

_ENTRY_POINTS = ("fista_steps", "evaluate", "relax_loop")


def _load_compiled():
    try:
        from . import _kernels as compiled
    except ImportError:
        return None
    # a stale build from an older source tree lacks newer entry points
    if not all(hasattr(compiled, name) for name in _ENTRY_POINTS):
        return None
    return compiled


BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("L0SCREEN_PURE_PYTHON"):
    _compiled = _load_compiled()
    if _compiled is not None:
        BACKEND = "cython"
        _impl = _compiled

fista_steps = _impl.fista_steps
evaluate = _impl.evaluate
relax_loop = _impl.relax_loop


def available_backends():
    """Map backend name to its kernel module."""
    out = {"python": _kernels_py}
    compiled = _load_compiled()
    if compiled is not None:
        out["cython"] = compiled
    return out
