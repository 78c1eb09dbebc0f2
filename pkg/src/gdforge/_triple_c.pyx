# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_triple_py`` on int64 arrays.

The caller guarantees that no partial sum can leave the int64 range.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


def failing(ptr_in, idx_in, val_in, base_in, terms_in, triples_in, parity_in,
            Py_ssize_t s, Py_ssize_t n_r, Py_ssize_t n_out):
    cdef int64_t[::1] ptr = np.ascontiguousarray(ptr_in, dtype=np.int64)
    cdef int64_t[::1] idx = np.ascontiguousarray(idx_in, dtype=np.int64)
    cdef int64_t[::1] val = np.ascontiguousarray(val_in, dtype=np.int64)
    cdef int64_t[::1] row_base = np.ascontiguousarray(base_in, dtype=np.int64)
    cdef int64_t[:, ::1] terms = np.ascontiguousarray(
        np.asarray(terms_in, dtype=np.int64).reshape(-1, 8))
    cdef int64_t[::1] triples = np.ascontiguousarray(triples_in, dtype=np.int64)
    cdef int64_t[::1] parity = np.ascontiguousarray(parity_in, dtype=np.int64)
    cdef int64_t[::1] acc = np.zeros(max(n_out, 1), dtype=np.int64)
    cdef char[::1] seen = np.zeros(max(n_out, 1), dtype=np.int8)
    cdef int64_t[::1] touched = np.zeros(max(n_out, 1), dtype=np.int64)
    cdef Py_ssize_t n = triples.shape[0] // 3
    cdef Py_ssize_t nterms = terms.shape[0]
    cdef Py_ssize_t t, k, q, q2, j, n_touched, row, orow, r, o
    cdef int64_t tri[3]
    cdef int64_t p0, p1, p2, e, f, c1, mask, a, b, c, right, base_out
    cdef bint bad
    out = []
    for t in range(n):
        tri[0] = triples[3 * t]
        tri[1] = triples[3 * t + 1]
        tri[2] = triples[3 * t + 2]
        p0 = parity[tri[0]]
        p1 = parity[tri[1]]
        p2 = parity[tri[2]]
        n_touched = 0
        for k in range(nterms):
            mask = terms[k, 1]
            e = 0
            if mask & 1:
                e ^= p0 & p1
            if mask & 2:
                e ^= p0 & p2
            if mask & 4:
                e ^= p1 & p2
            f = -terms[k, 0] if e else terms[k, 0]
            right = terms[k, 4]
            a = tri[terms[k, 5]]
            b = tri[terms[k, 6]]
            c = tri[terms[k, 7]]
            base_out = row_base[terms[k, 3]]
            if right:
                row = row_base[terms[k, 2]] + b * s + c
            else:
                row = row_base[terms[k, 2]] + a * s + b
            for q in range(ptr[row], ptr[row + 1]):
                r = idx[q]
                c1 = f * val[q]
                if right:
                    orow = base_out + a * n_r + r
                else:
                    orow = base_out + r * s + c
                for q2 in range(ptr[orow], ptr[orow + 1]):
                    o = idx[q2]
                    if not seen[o]:
                        seen[o] = 1
                        touched[n_touched] = o
                        n_touched += 1
                    acc[o] += c1 * val[q2]
        bad = False
        for j in range(n_touched):
            o = touched[j]
            if acc[o] != 0:
                bad = True
            acc[o] = 0
            seen[o] = 0
        if bad:
            out.append(t)
    return out
