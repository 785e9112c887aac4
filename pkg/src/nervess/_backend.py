"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``NERVESS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

pykernels = _pykernels

if os.environ.get("NERVESS_PURE_PYTHON"):
    kernels = _pykernels
    NAME = "python"
else:
    try:
        from . import _ckernels as kernels
        NAME = "cython"
    except ImportError:  # extension not built
        kernels = _pykernels
        NAME = "python"


def threads():
    """Worker bound from NERVESS_THREADS (default 1)."""
    try:
        n = int(os.environ.get("NERVESS_THREADS", "1"))
    except ValueError:
        raise ValueError("NERVESS_THREADS must be a positive integer")
    if n < 1:
        raise ValueError("NERVESS_THREADS must be a positive integer")
    return n


def pmap(fn, items):
    """Ordered map over independent jobs; threads help since the kernels drop the GIL."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
