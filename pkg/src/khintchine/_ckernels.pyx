# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled slab-membership and solution-counting loops.

Semantics are mirrored exactly by ``_pykernels``; both compute ``qX`` by
left-to-right accumulation and round with ``floor(v + 0.5)``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()

BACKEND = "cython"


cdef inline long long _gcd(long long a, long long b) noexcept nogil:
    cdef long long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def slab_status(const double[:, ::1] X, const long long[::1] q, int m,
                long long qgcd, double delta, bint coprime, double guard):
    """Per-sample status: 0 outside, 1 inside, 2 too close to the boundary."""
    cdef Py_ssize_t k = X.shape[0], n = q.shape[0]
    cdef Py_ssize_t s, i, j
    cdef double v, r, dist, dmax
    cdef long long g
    out_arr = np.zeros(k, dtype=np.int8)
    cdef signed char[::1] out = out_arr
    with nogil:
        for s in range(k):
            dmax = 0.0
            g = qgcd
            for j in range(m):
                v = 0.0
                for i in range(n):
                    v = v + (<double>q[i]) * X[s, i * m + j]
                r = floor(v + 0.5)
                dist = fabs(v - r)
                if dist > dmax:
                    dmax = dist
                if coprime and g != 1:
                    g = _gcd(g, <long long>r)
            if fabs(dmax - delta) < guard:
                out[s] = 2
            elif dmax < delta and (not coprime or g == 1):
                out[s] = 1
    return out_arr


def count_buckets(const double[:, ::1] X, const long long[:, ::1] qs,
                  const long long[::1] qgcd, const double[::1] thresh,
                  const long long[::1] bucket, Py_ssize_t nbuckets, int m, bint coprime):
    """For each sample, count ``q`` with ``max_j ||(qX)_j|| < thresh[q]`` into ``bucket[q]``.

    With ``coprime`` the nearest integer vector ``p`` must satisfy ``gcd(p, q) = 1``.
    """
    cdef Py_ssize_t k = X.shape[0], Q = qs.shape[0], n = qs.shape[1]
    cdef Py_ssize_t s, t, i, j
    cdef double v, r, dist, th
    cdef long long g
    cdef bint ok
    out_arr = np.zeros((k, nbuckets), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    with nogil:
        for s in range(k):
            for t in range(Q):
                th = thresh[t]
                ok = True
                g = qgcd[t]
                for j in range(m):
                    v = 0.0
                    for i in range(n):
                        v = v + (<double>qs[t, i]) * X[s, i * m + j]
                    r = floor(v + 0.5)
                    dist = fabs(v - r)
                    if dist >= th:
                        ok = False
                        break
                    if coprime and g != 1:
                        g = _gcd(g, <long long>r)
                if ok and (not coprime or g == 1):
                    out[s, bucket[t]] += 1
    return out_arr
