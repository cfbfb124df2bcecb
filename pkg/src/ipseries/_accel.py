"""Numba switch for the hot kernels.

Set ``IPSERIES_DISABLE_NUMBA=1`` to run every kernel through its numpy
fallback. The flag is read once, at import time.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("IPSERIES_DISABLE_NUMBA", "").strip().lower()

try:  # pragma: no cover - depends on the environment
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in {"1", "true", "yes", "on"}


def njit(func=None, **options):
    """Compile with ``numba.njit(cache=True, **options)`` when available.

    Works bare (``@njit``) or with options (``@njit(fastmath=True)``). Without
    numba the function is returned unchanged.
    """

    def wrap(f):
        if not HAVE_NUMBA:
            return f
        return numba.njit(cache=True, **options)(f)

    return wrap if func is None else wrap(func)
