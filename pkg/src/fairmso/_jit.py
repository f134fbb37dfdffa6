"""JIT switch for the numeric kernels.

Set ``FAIRMSO_NO_JIT=1`` to run every kernel as plain Python/numpy.  The
kernels are written so that both paths execute the same source.
"""
import os

USE_JIT = os.environ.get("FAIRMSO_NO_JIT", "").strip().lower() not in ("1", "true", "yes")

if USE_JIT:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USE_JIT = False

if USE_JIT:
    def njit(fn):
        return _njit(cache=True)(fn)
else:
    def njit(fn):
        fn.py_func = fn
        return fn
