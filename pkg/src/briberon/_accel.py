"""JIT switch for the numeric kernels.

Kernels are written once in a numba-compatible subset of Python.  When numba is
importable and ``BRIBERON_DISABLE_NUMBA`` is unset (or ``0``), they are compiled
with ``numba.njit``; otherwise the very same functions run as plain Python.
"""

import os

_DISABLED = os.environ.get("BRIBERON_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by BRIBERON_DISABLE_NUMBA")
    from numba import njit as _numba_njit

    NUMBA_ENABLED = True
except ImportError:
    _numba_njit = None
    NUMBA_ENABLED = False


def njit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if NUMBA_ENABLED:
        return _numba_njit(cache=True, nogil=True)(func)
    return func


def py_func(func):
    """Return the uncompiled Python version of a (possibly) jitted kernel."""
    return getattr(func, "py_func", func)
