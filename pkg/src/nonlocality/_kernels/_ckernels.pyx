# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled assignment kernels; same contracts as ``_pykernels``."""
import numpy as np
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, uint8_t

from ._pykernels import prefix_tables


def consistent_codes(support, int n):
    cdef list tables = prefix_tables(support, n)
    cdef Py_ssize_t total = 0, d
    cdef Py_ssize_t w
    for d in range(n):
        w = 1 << (d + 1)
        total += w * w
    flat_np = np.empty(total, dtype=np.uint8)
    cdef uint8_t[::1] flat = flat_np
    cdef Py_ssize_t* aoff = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* uoff = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef int* choice = <int*> malloc(n * sizeof(int))
    cdef int64_t* u = <int64_t*> malloc(((2 << n) + 2) * sizeof(int64_t))
    cdef Py_ssize_t pos = 0
    for d in range(n):
        w = 1 << (d + 1)
        aoff[d] = pos
        uoff[d] = w - 2
        flat_np[pos:pos + w * w] = tables[d].reshape(-1)
        pos += w * w

    result = []
    cdef int depth = 0
    cdef int a, o0, o1
    cdef Py_ssize_t ps, parent
    cdef int64_t val, code
    cdef bint ok
    try:
        choice[0] = -1
        while depth >= 0:
            choice[depth] += 1
            if choice[depth] > 3:
                depth -= 1
                continue
            a = choice[depth]
            o0 = a & 1
            o1 = a >> 1
            w = 1 << (depth + 1)
            ok = True
            for ps in range(w):
                if depth == 0:
                    val = 0
                else:
                    val = u[uoff[depth - 1] + (ps >> 1)] << 1
                val |= o1 if (ps & 1) else o0
                u[uoff[depth] + ps] = val
                if not flat[aoff[depth] + ps * w + val]:
                    ok = False
                    break
            if not ok:
                continue
            if depth == n - 1:
                code = 0
                for d in range(n):
                    code = code * 4 + choice[d]
                result.append(code)
            else:
                depth += 1
                choice[depth] = -1
    finally:
        free(aoff)
        free(uoff)
        free(choice)
        free(u)
    return np.array(result, dtype=np.int64)


def hit_sections(codes, int n):
    cdef Py_ssize_t dim = 1 << n
    hits_np = np.zeros((dim, dim), dtype=np.uint8)
    cdef uint8_t[:, ::1] hits = hits_np
    cdef int64_t[::1] cv = np.ascontiguousarray(codes, dtype=np.int64)
    cdef Py_ssize_t k, c
    cdef int p, shift, a, s
    cdef int64_t code, out
    for k in range(cv.shape[0]):
        code = cv[k]
        for c in range(dim):
            out = 0
            for p in range(n):
                shift = n - 1 - p
                a = (code >> (2 * shift)) & 3
                s = (c >> shift) & 1
                out |= ((a >> s) & 1) << shift
            hits[c, out] = 1
    return hits_np


def outcome_matrix(codes, int n):
    cdef Py_ssize_t dim = 1 << n
    cdef int64_t[::1] cv = np.ascontiguousarray(codes, dtype=np.int64)
    res_np = np.zeros((cv.shape[0], dim), dtype=np.int64)
    cdef int64_t[:, ::1] res = res_np
    cdef Py_ssize_t k, c
    cdef int p, shift, a, s
    cdef int64_t code, out
    for k in range(cv.shape[0]):
        code = cv[k]
        for c in range(dim):
            out = 0
            for p in range(n):
                shift = n - 1 - p
                a = (code >> (2 * shift)) & 3
                s = (c >> shift) & 1
                out |= ((a >> s) & 1) << shift
            res[k, c] = out
    return res_np
