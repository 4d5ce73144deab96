# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Bit-for-bit compatible with ``wosqmc._purepy``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

KIND_CIRCLE = 0
KIND_ARC = 1
KIND_SEGMENT = 2

NPARAMS = 12


def sobol_fill(vectors, Py_ssize_t n):
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] vec = np.ascontiguousarray(vectors, dtype=np.uint64)
    cdef Py_ssize_t s = vec.shape[0]
    cdef Py_ssize_t nbits = vec.shape[1]
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] out = np.zeros((n, s), dtype=np.uint64)
    cdef Py_ssize_t i, j, b
    cdef unsigned long long idx
    with nogil:
        for i in range(n):
            idx = <unsigned long long> i
            b = 0
            while idx != 0:
                if idx & 1ULL:
                    for j in range(s):
                        out[i, j] ^= vec[j, b]
                idx >>= 1
                b += 1
    return out


cdef inline unsigned long long _axes_to_key(unsigned long long* x, int p, int d) nogil:
    cdef unsigned long long q, pm, t, key, bit
    cdef int i, b
    # inverse undo
    q = 1ULL << (p - 1)
    while q > 1ULL:
        pm = q - 1ULL
        for i in range(d):
            if x[i] & q:
                x[0] ^= pm
            else:
                t = (x[0] ^ x[i]) & pm
                x[0] ^= t
                x[i] ^= t
        q >>= 1
    # Gray encode
    for i in range(1, d):
        x[i] ^= x[i - 1]
    t = 0
    q = 1ULL << (p - 1)
    while q > 1ULL:
        if x[d - 1] & q:
            t ^= q - 1ULL
        q >>= 1
    for i in range(d):
        x[i] ^= t
    key = 0
    for b in range(p):
        for i in range(d):
            bit = (x[i] >> b) & 1ULL
            key |= bit << (b * d + (d - 1 - i))
    return key


cdef inline void _key_to_axes(unsigned long long key, int p, int d,
                              unsigned long long* x) nogil:
    cdef unsigned long long q, pm, t, bit
    cdef int i, b
    for i in range(d):
        x[i] = 0
    for b in range(p):
        for i in range(d):
            bit = (key >> (b * d + (d - 1 - i))) & 1ULL
            x[i] |= bit << b
    # Gray decode
    t = x[d - 1] >> 1
    for i in range(d - 1, 0, -1):
        x[i] ^= x[i - 1]
    x[0] ^= t
    # undo excess work
    q = 2
    while q != (1ULL << p):
        pm = q - 1ULL
        for i in range(d - 1, -1, -1):
            if x[i] & q:
                x[0] ^= pm
            else:
                t = (x[0] ^ x[i]) & pm
                x[0] ^= t
                x[i] ^= t
        q <<= 1


def hilbert_encode(cells, int p):
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] c = np.ascontiguousarray(cells, dtype=np.uint64)
    cdef Py_ssize_t n = c.shape[0]
    cdef int d = <int> c.shape[1]
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(n, dtype=np.uint64)
    cdef unsigned long long x[8]
    cdef Py_ssize_t i
    cdef int j
    with nogil:
        for i in range(n):
            for j in range(d):
                x[j] = c[i, j]
            out[i] = _axes_to_key(x, p, d)
    return out


def hilbert_decode(keys, int p, int d):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] k = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t n = k.shape[0]
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] out = np.empty((n, d), dtype=np.uint64)
    cdef unsigned long long x[8]
    cdef Py_ssize_t i
    cdef int j
    with nogil:
        for i in range(n):
            _key_to_axes(k[i], p, d, x)
            for j in range(d):
                out[i, j] = x[j]
    return out


def nearest_primitive(points, kinds, params):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] kd = np.ascontiguousarray(kinds, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pr = np.ascontiguousarray(params, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t m = kd.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef double px, py, dx, dy, ux, uy, cross, d, t, ex, ey, d0, d1, best
    cdef long long bestj
    cdef int inside
    with nogil:
        for i in range(n):
            px = pts[i, 0]
            py = pts[i, 1]
            best = 1e300
            bestj = 0
            for j in range(m):
                if kd[j] == 0:  # circle
                    dx = px - pr[j, 0]
                    dy = py - pr[j, 1]
                    d = fabs(sqrt(dx * dx + dy * dy) - pr[j, 2])
                elif kd[j] == 1:  # arc
                    dx = px - pr[j, 0]
                    dy = py - pr[j, 1]
                    ux = pr[j, 3] * dx + pr[j, 4] * dy
                    uy = pr[j, 3] * dy - pr[j, 4] * dx
                    cross = pr[j, 5] * uy - pr[j, 6] * ux
                    if pr[j, 7] != 0.0:
                        inside = (uy >= 0.0) or (cross <= 0.0)
                    else:
                        inside = (uy >= 0.0) and (cross <= 0.0)
                    if inside:
                        d = fabs(sqrt(dx * dx + dy * dy) - pr[j, 2])
                    else:
                        ex = px - pr[j, 8]
                        ey = py - pr[j, 9]
                        d0 = sqrt(ex * ex + ey * ey)
                        ex = px - pr[j, 10]
                        ey = py - pr[j, 11]
                        d1 = sqrt(ex * ex + ey * ey)
                        d = d0 if d0 < d1 else d1
                else:  # segment
                    dx = px - pr[j, 0]
                    dy = py - pr[j, 1]
                    t = (dx * pr[j, 2] + dy * pr[j, 3]) * pr[j, 4]
                    if t < 0.0:
                        t = 0.0
                    if t > 1.0:
                        t = 1.0
                    ex = dx - t * pr[j, 2]
                    ey = dy - t * pr[j, 3]
                    d = sqrt(ex * ex + ey * ey)
                if d < best:
                    best = d
                    bestj = j
            dist[i] = best
            idx[i] = bestj
    return dist, idx
