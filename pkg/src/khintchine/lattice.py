"""Dense enumeration of integer vectors by sup norm (numpy arrays)."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import CapacityError

MAX_DIM = 3
MAX_HORIZON = 1024


@lru_cache(maxsize=16)
def halfspace_vectors(n: int, h: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectors ``0 < |q| <= h`` whose first nonzero coordinate is positive.

    Returns ``(qs, norms, gcds)``; ``-q`` is implied for every row. Arrays are
    read-only because they are cached.
    """
    if n < 1 or h < 1:
        raise ValueError("need n >= 1 and h >= 1")
    if n > MAX_DIM or h > MAX_HORIZON:
        raise CapacityError(f"dense enumeration capped at n <= {MAX_DIM}, |q| <= {MAX_HORIZON}")
    axis = np.arange(-h, h + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    nz = grid != 0
    first = np.argmax(nz, axis=1)
    lead = grid[np.arange(len(grid)), first]
    qs = np.ascontiguousarray(grid[lead > 0])
    norms = np.abs(qs).max(axis=1)
    gcds = np.gcd.reduce(np.abs(qs), axis=1)
    order = np.lexsort((*(qs[:, i] for i in reversed(range(n))), norms))
    out = tuple(np.ascontiguousarray(a[order]) for a in (qs, norms, gcds))
    for a in out:
        a.setflags(write=False)
    return out
