"""Numba switch.

Hot kernels are compiled with numba when it is importable. Setting the
environment variable ``CVQKD_DISABLE_NUMBA=1`` before import forces the
pure-numpy code paths; both paths are always defined so they can be
benchmarked against each other.
"""
import os

DISABLE_ENV = "CVQKD_DISABLE_NUMBA"

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _disabled_by_env():
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()

njit_opts = {"cache": True, "nogil": True, "fastmath": False}


def njit(func):
    """Compile ``func`` with numba if available, else return it unchanged."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(**njit_opts)(func)
