# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination and divided-power product kernels.

Codes are uint8 (q <= 256); field arithmetic goes through the add/mul/neg/inv
tables built by :class:`gfl.fields.FieldSpec`.  GF(2) matrices use rows of
packed uint64 words, bit ``c & 63`` of word ``c >> 6`` holding column ``c``.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, uint64_t, int32_t, int64_t

cnp.import_array()


def echelon_tab(uint8_t[:, ::1] A, const uint8_t[:, ::1] add,
                const uint8_t[:, ::1] mul, const uint8_t[::1] neg,
                const uint8_t[::1] inv, bint reduced):
    """In-place row echelon form; returns the pivot columns."""
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef uint8_t a, f, tmp
    pivots = []
    with nogil:
        c = 0
        while c < n and r < m:
            piv = -1
            for i in range(r, m):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                c += 1
                continue
            if piv != r:
                for j in range(c, n):
                    tmp = A[r, j]
                    A[r, j] = A[piv, j]
                    A[piv, j] = tmp
            a = A[r, c]
            if a != 1:
                f = inv[a]
                for j in range(c, n):
                    A[r, j] = mul[f, A[r, j]]
            for i in range(0 if reduced else r + 1, m):
                if i == r or A[i, c] == 0:
                    continue
                f = neg[A[i, c]]
                for j in range(c, n):
                    if A[r, j] != 0:
                        A[i, j] = add[A[i, j], mul[f, A[r, j]]]
            with gil:
                pivots.append(c)
            r += 1
            c += 1
    return pivots


def echelon_gf2(uint64_t[:, ::1] W, Py_ssize_t ncols, bint reduced):
    """In-place echelon form of packed GF(2) rows; returns pivot columns."""
    cdef Py_ssize_t m = W.shape[0], nw = W.shape[1]
    cdef Py_ssize_t r = 0, c, i, k, piv, w
    cdef uint64_t bit, tmp
    pivots = []
    with nogil:
        c = 0
        while c < ncols and r < m:
            w = c >> 6
            bit = (<uint64_t>1) << (c & 63)
            piv = -1
            for i in range(r, m):
                if W[i, w] & bit:
                    piv = i
                    break
            if piv < 0:
                c += 1
                continue
            if piv != r:
                for k in range(w, nw):
                    tmp = W[r, k]
                    W[r, k] = W[piv, k]
                    W[piv, k] = tmp
            for i in range(0 if reduced else r + 1, m):
                if i != r and (W[i, w] & bit):
                    for k in range(w, nw):
                        W[i, k] ^= W[r, k]
            with gil:
                pivots.append(c)
            r += 1
            c += 1
    return pivots


def mul_scatter_tab(const uint8_t[:, ::1] X, const uint8_t[:, ::1] Y,
                    const int32_t[::1] ia, const int32_t[::1] ib,
                    const int32_t[::1] ic, const uint8_t[::1] coef,
                    uint8_t[:, ::1] out, const uint8_t[:, ::1] add,
                    const uint8_t[:, ::1] mul):
    """out[t, ic[k]] += coef[k] * X[t, ia[k]] * Y[t, ib[k]] for every t, k."""
    cdef Py_ssize_t B = X.shape[0], npairs = ia.shape[0]
    cdef Py_ssize_t t, k
    cdef uint8_t x, y, v
    with nogil:
        for t in range(B):
            for k in range(npairs):
                x = X[t, ia[k]]
                if x == 0:
                    continue
                y = Y[t, ib[k]]
                if y == 0:
                    continue
                v = mul[coef[k], mul[x, y]]
                out[t, ic[k]] = add[out[t, ic[k]], v]
