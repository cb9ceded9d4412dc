# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled replication loop. Must consume the bit stream exactly like ``_fallback``."""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc
from numpy.random cimport bitgen_t

cnp.import_array()

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef inline uint64_t _bounded(bitgen_t *bg, uint64_t m) noexcept nogil:
    cdef uint64_t x = bg.next_uint64(bg.state) >> 32
    cdef uint64_t p = x * m
    cdef uint64_t low = p & 0xFFFFFFFFULL
    cdef uint64_t threshold
    if low < m:
        threshold = ((<uint64_t>1 << 32) - m) % m
        while low < threshold:
            x = bg.next_uint64(bg.state) >> 32
            p = x * m
            low = p & 0xFFFFFFFFULL
    return p >> 32


cdef inline bint _agreed(const int64_t *x, Py_ssize_t n, double epsilon) noexcept nogil:
    cdef int64_t lo = x[0]
    cdef int64_t hi = x[0]
    cdef Py_ssize_t i
    for i in range(1, n):
        if x[i] < lo:
            lo = x[i]
        elif x[i] > hi:
            hi = x[i]
    return <double>(hi - lo) < epsilon


cdef Py_ssize_t _run(const int64_t[::1] indptr, const int64_t[::1] indices,
                     int64_t *x, int64_t *new, int64_t *cnt, int64_t *senders,
                     Py_ssize_t n, Py_ssize_t max_steps, double epsilon,
                     bitgen_t *bg, bint *converged) noexcept nogil:
    cdef Py_ssize_t t, i, j, deg, c, tgt
    cdef int64_t *tmp
    if _agreed(x, n, epsilon):
        converged[0] = True
        return 0
    for t in range(1, max_steps + 1):
        for i in range(n):
            cnt[i] = 0
        for j in range(n):
            deg = indptr[j + 1] - indptr[j]
            if deg == 0:
                continue
            if deg == 1:
                tgt = indices[indptr[j]]
            else:
                tgt = indices[indptr[j] + <Py_ssize_t>_bounded(bg, deg)]
            senders[tgt * n + cnt[tgt]] = j
            cnt[tgt] += 1
        for i in range(n):
            c = cnt[i]
            if c == 0:
                new[i] = x[i]
            elif c == 1:
                new[i] = x[senders[i * n]]
            else:
                new[i] = x[senders[i * n + <Py_ssize_t>_bounded(bg, c)]]
        for i in range(n):
            x[i] = new[i]
        if _agreed(x, n, epsilon):
            converged[0] = True
            return t
    converged[0] = False
    return max_steps


def replicate(const int64_t[::1] indptr, const int64_t[::1] indices, x0,
              Py_ssize_t max_steps, double epsilon, rng, trace=None):
    """Run one replication; same contract as ``_fallback.replicate`` (``trace`` unsupported)."""
    if trace is not None:
        raise NotImplementedError("tracing runs on the Python path")
    cdef int64_t[::1] state = np.ascontiguousarray(x0, dtype=np.int64).copy()
    cdef Py_ssize_t n = state.shape[0]
    cdef object bit_generator = rng.bit_generator
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("invalid bit generator capsule")
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)
    cdef int64_t *new = <int64_t *> malloc(n * sizeof(int64_t))
    cdef int64_t *cnt = <int64_t *> malloc(n * sizeof(int64_t))
    cdef int64_t *senders = <int64_t *> malloc(n * n * sizeof(int64_t))
    cdef bint converged = False
    cdef Py_ssize_t steps
    if new == NULL or cnt == NULL or senders == NULL:
        free(new); free(cnt); free(senders)
        raise MemoryError()
    try:
        with bit_generator.lock, nogil:
            steps = _run(indptr, indices, &state[0], new, cnt, senders,
                         n, max_steps, epsilon, bg, &converged)
    finally:
        free(new); free(cnt); free(senders)
    return steps, np.asarray(state), bool(converged)
