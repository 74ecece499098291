"""Backend selection for the hot loops.

``DELTAION_BACKEND=numpy`` forces the pure-numpy path; otherwise numba is
used when it imports cleanly.
"""

from __future__ import annotations

import functools
import os

_requested = os.environ.get("DELTAION_BACKEND", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError("numba disabled by DELTAION_BACKEND")
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    nb = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(func=None, **kwargs):
    """``numba.njit`` with package defaults, or identity when numba is off."""
    if func is None:
        return functools.partial(njit, **kwargs)
    if not HAVE_NUMBA:
        return func
    opts = {"cache": True, "nogil": True}
    opts.update(kwargs)
    return nb.njit(**opts)(func)
