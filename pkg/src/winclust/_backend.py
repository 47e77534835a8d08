"""Kernel backend selection.

The pairwise-comparison kernels exist twice: a numba @njit version (default)
and a pure-numpy blocked version. Set WINCLUST_NUMBA=0 to force the numpy
path; this is also the automatic fallback when numba is not importable.
"""

import os

_flag = os.environ.get("WINCLUST_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

if _want_numba:
    try:
        import numba  # noqa: F401

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False
else:
    HAS_NUMBA = False

USE_NUMBA = _want_numba and HAS_NUMBA


def set_num_threads(n: int) -> None:
    """Cap the kernel worker pool; no-op on the numpy backend."""
    if USE_NUMBA:
        import numba

        numba.set_num_threads(max(1, int(n)))
