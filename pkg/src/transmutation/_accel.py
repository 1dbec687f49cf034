"""Optional numba acceleration.

Set ``TRANSMUTATION_NO_NUMBA=1`` in the environment to force the pure numpy
code paths (useful for debugging and for the benchmark comparison).
"""
import os

_DISABLE_FLAG = "TRANSMUTATION_NO_NUMBA"


def _disabled_by_env():
    return os.environ.get(_DISABLE_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    from numba import njit as _numba_njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    _numba_njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()


def njit(func):
    """Compile ``func`` with numba when available, otherwise return it unchanged.

    The plain-Python version is still usable (slowly); the numpy fallbacks in
    ``_kernels`` are what run when numba is off.
    """
    if HAVE_NUMBA:
        return _numba_njit(cache=True, nogil=True)(func)
    return func
