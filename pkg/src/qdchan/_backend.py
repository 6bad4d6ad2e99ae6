"""Numba/NumPy backend selection for the hot kernels.

The numerical kernels in :mod:`qdchan._kernels` exist in two flavours: a
numba ``@njit``-compiled path and a pure-NumPy fallback.  The fallback is
selected when numba is unavailable or when the environment variable
``QDCHAN_DISABLE_NUMBA`` is set to a non-empty value other than ``0``.

``QDCHAN_THREADS`` caps the numba threading layer (the kernels themselves
are single-threaded; this guards against oversubscription when callers
parallelise restarts externally).
"""

import os


def _env_disabled() -> bool:
    flag = os.environ.get("QDCHAN_DISABLE_NUMBA", "")
    return flag not in ("", "0", "false", "False")


USE_NUMBA = False
if not _env_disabled():
    try:
        import numba  # noqa: F401

        USE_NUMBA = True
        nthreads = os.environ.get("QDCHAN_THREADS", "")
        if nthreads.isdigit() and int(nthreads) > 0:
            numba.set_num_threads(max(1, min(int(nthreads), numba.config.NUMBA_NUM_THREADS)))
    except ImportError:
        USE_NUMBA = False


def backend_name() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
