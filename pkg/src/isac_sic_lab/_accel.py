"""Numba switch.

Set ``ISAC_SIC_LAB_DISABLE_NUMBA=1`` to run every hot kernel through its
pure-numpy path. The flag is read once at import; tests flip
:data:`USE_NUMBA` directly to compare both paths in one process.
"""
import os

_DISABLED = os.environ.get("ISAC_SIC_LAB_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba_njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(func):
    """Compile ``func`` with numba if available, else return it untouched."""
    if not HAVE_NUMBA:
        return func
    return _numba_njit(cache=True)(func)


def backend():
    return "numba" if USE_NUMBA else "numpy"
