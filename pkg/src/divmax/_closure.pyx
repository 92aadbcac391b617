# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for canonicalizing sign vectors under symmetry and negation."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def canonical_keys(cnp.int8_t[:, :] trits, cnp.int64_t[:, :] perms, cnp.int64_t[:] pow3):
    """Minimal packed key over the group orbit and global negation.

    trits holds sigma + 1 per entry (values 0, 1, 2); perms act by
    (g.sigma)[i] = sigma[g[i]]; keys pack base 3 with state 0 most
    significant, so key order matches lexicographic order on sigma.
    """
    cdef Py_ssize_t m = trits.shape[0]
    cdef Py_ssize_t n = trits.shape[1]
    cdef Py_ssize_t g_count = perms.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[:] out_v = out
    cdef Py_ssize_t i, g, j
    cdef cnp.int64_t best, k1, k2, t
    for i in range(m):
        best = -1
        for g in range(g_count):
            k1 = 0
            k2 = 0
            for j in range(n):
                t = trits[i, perms[g, j]]
                k1 += t * pow3[j]
                k2 += (2 - t) * pow3[j]
            if k2 < k1:
                k1 = k2
            if best < 0 or k1 < best:
                best = k1
        out_v[i] = best
    return out


def compose_pack(cnp.int8_t[:, :] frontier, cnp.int8_t[:, :] circuits, cnp.int64_t[:] pow3):
    """Packed keys of all compositions frontier[i] o circuits[j].

    Composition takes the frontier entry where it is nonzero and the
    circuit entry where it is zero; returns an (f * c,) int64 key array
    in row-major (i, j) order.
    """
    cdef Py_ssize_t f = frontier.shape[0]
    cdef Py_ssize_t c = circuits.shape[0]
    cdef Py_ssize_t n = frontier.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(f * c, dtype=np.int64)
    cdef cnp.int64_t[:] out_v = out
    cdef Py_ssize_t i, j, k
    cdef cnp.int64_t key
    cdef cnp.int8_t a
    for i in range(f):
        for j in range(c):
            key = 0
            for k in range(n):
                a = frontier[i, k]
                if a == 0:
                    a = circuits[j, k]
                key += (a + 1) * pow3[k]
            out_v[i * c + j] = key
    return out
