"""Numpy fallback for the compiled kernels; results are bit-identical."""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

_BLOCK = 1 << 18


def _project(X: np.ndarray, q: np.ndarray, n: int, m: int, j: int) -> np.ndarray:
    # Left-to-right accumulation keeps the rounding identical to the C loop.
    v = np.zeros(np.broadcast_shapes(X.shape[:-1], q.shape[:-1]))
    for i in range(n):
        v = v + q[..., i].astype(np.float64) * X[..., i * m + j]
    return v


def slab_status(X, q, m, qgcd, delta, coprime, guard):
    X = np.ascontiguousarray(X, dtype=np.float64)
    q = np.asarray(q, dtype=np.int64)
    n = q.shape[0]
    dmax = np.zeros(X.shape[0])
    g = np.full(X.shape[0], qgcd, dtype=np.int64)
    for j in range(m):
        v = _project(X, q, n, m, j)
        r = np.floor(v + 0.5)
        dmax = np.maximum(dmax, np.abs(v - r))
        if coprime:
            g = np.gcd(g, r.astype(np.int64))
    out = np.zeros(X.shape[0], dtype=np.int8)
    inside = dmax < delta
    if coprime:
        inside &= g == 1
    out[inside] = 1
    out[np.abs(dmax - delta) < guard] = 2
    return out


def count_buckets(X, qs, qgcd, thresh, bucket, nbuckets, m, coprime):
    X = np.ascontiguousarray(X, dtype=np.float64)
    qs = np.asarray(qs, dtype=np.int64)
    qgcd = np.asarray(qgcd, dtype=np.int64)
    thresh = np.asarray(thresh, dtype=np.float64)
    bucket = np.asarray(bucket, dtype=np.int64)
    k, (Q, n) = X.shape[0], qs.shape
    out = np.zeros(k * nbuckets, dtype=np.int64)
    bq = min(max(Q, 1), _BLOCK)
    bx = max(1, _BLOCK // bq)
    for xs in range(0, k, bx):
        Xb = X[xs : xs + bx, None, :]
        nx = Xb.shape[0]
        rows = np.arange(nx)[:, None] * nbuckets
        acc = out[xs * nbuckets : (xs + nx) * nbuckets]
        for qstart in range(0, Q, bq):
            sl = slice(qstart, qstart + bq)
            qb = qs[sl][None, :, :]
            ok = np.ones((nx, qb.shape[1]), dtype=bool)
            g = np.broadcast_to(qgcd[sl], ok.shape)
            for j in range(m):
                v = _project(Xb, qb, n, m, j)
                r = np.floor(v + 0.5)
                ok &= np.abs(v - r) < thresh[sl]
                if coprime:
                    g = np.gcd(g, r.astype(np.int64))
            if coprime:
                ok &= g == 1
            idx = (rows + bucket[sl][None, :])[ok]
            acc += np.bincount(idx, minlength=nx * nbuckets)
    return out.reshape(k, nbuckets)
