# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled window kernels: the hot inner loops of collocation counting.

Mirrors ``_py`` exactly; the Python layer picks whichever imports.
"""

from libc.stdint cimport int32_t, int64_t

import numpy as np


def count_window_hits(const int64_t[::1] targets, const int64_t[::1] probes, long w):
    """Number of target positions with >=1 probe within distance w (sorted inputs)."""
    cdef Py_ssize_t n = targets.shape[0]
    cdef Py_ssize_t m = probes.shape[0]
    cdef Py_ssize_t i, j = 0
    cdef long hits = 0
    cdef int64_t lo
    if n == 0 or m == 0:
        return 0
    with nogil:
        for i in range(n):
            lo = targets[i] - w
            while j < m and probes[j] < lo:
                j += 1
            if j < m and probes[j] <= targets[i] + w:
                hits += 1
    return hits


def window_pair_ids(const int32_t[::1] ids, long w):
    """(left, right) id pairs for p < q, q - p <= w; negative ids skipped, same-id dropped."""
    cdef Py_ssize_t n = ids.shape[0]
    cdef Py_ssize_t cap = n * w
    if cap < 1:
        cap = 1
    out_a = np.empty(cap, dtype=np.int32)
    out_b = np.empty(cap, dtype=np.int32)
    cdef int32_t[::1] va = out_a
    cdef int32_t[::1] vb = out_b
    cdef Py_ssize_t p, q, qmax, k = 0
    cdef int32_t ip, iq
    with nogil:
        for p in range(n):
            ip = ids[p]
            if ip < 0:
                continue
            qmax = p + w + 1
            if qmax > n:
                qmax = n
            for q in range(p + 1, qmax):
                iq = ids[q]
                if iq >= 0 and iq != ip:
                    va[k] = ip
                    vb[k] = iq
                    k += 1
    return out_a[:k], out_b[:k]
