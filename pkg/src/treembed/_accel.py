"""Backend selection for the numeric kernels.

Set ``TREEMBED_DISABLE_NUMBA=1`` to force the pure-numpy code paths.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

# the kernels are serial; skip the TBB probe that the default layer runs
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("TREEMBED_DISABLE_NUMBA", "").lower() in _FALSY


def njit(func):
    if _numba is None:  # pragma: no cover
        return func
    return _numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"


def set_workers(n):
    if n is None or not NUMBA_AVAILABLE:
        return
    n = max(1, min(int(n), _numba.config.NUMBA_NUM_THREADS))
    _numba.set_num_threads(n)
