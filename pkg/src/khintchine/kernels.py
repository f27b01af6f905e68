"""Backend selection for the hot loops.

The compiled extension is used when importable; setting
``KHINTCHINE_PURE=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("KHINTCHINE_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
slab_status = _impl.slab_status
count_buckets = _impl.count_buckets


def backends() -> dict:
    """All importable backends keyed by name."""
    out = {"numpy": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
