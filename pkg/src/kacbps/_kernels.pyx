# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; same contracts as _kernels_py."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline long long _find(long long[::1] parent, long long x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def uf_union_perm(cnp.ndarray[cnp.int64_t, ndim=1] parent, perm):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] P = np.ascontiguousarray(perm, dtype=np.int64)
    cdef long long[::1] pv = P
    cdef long long[::1] par = parent
    cdef Py_ssize_t x, n = par.shape[0]
    cdef long long a, b
    with nogil:
        for x in range(n):
            a = _find(par, x)
            b = _find(par, pv[x])
            if a < b:
                par[b] = a
            elif b < a:
                par[a] = b


def uf_labels(cnp.ndarray[cnp.int64_t, ndim=1] parent):
    cdef long long[::1] par = parent
    cdef Py_ssize_t x, n = par.shape[0]
    with nogil:
        for x in range(n):
            par[x] = _find(par, x)
    return parent


def orbit_labels(long long n, perms):
    parent = np.arange(n, dtype=np.int64)
    for perm in perms:
        uf_union_perm(parent, perm)
    return uf_labels(parent)


def linear_images(indices, mat, long long p):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] M = np.ascontiguousarray(np.asarray(mat, dtype=np.int64) % p)
    cdef long long[::1] iv = idx
    cdef long long[:, ::1] mv = M
    cdef Py_ssize_t length = M.shape[1], rows = M.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(idx.shape[0], dtype=np.int64)
    cdef long long[::1] ov = out
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dbuf = np.empty(max(length, 1), dtype=np.int64)
    cdef long long[::1] dig = dbuf
    cdef Py_ssize_t i, r, c
    cdef long long x, acc, code, w
    with nogil:
        for i in range(iv.shape[0]):
            x = iv[i]
            for c in range(length):
                dig[c] = x % p
                x = x // p
            code = 0
            w = 1
            for r in range(rows):
                acc = 0
                for c in range(length):
                    acc += mv[r, c] * dig[c]
                code += (acc % p) * w
                w *= p
            ov[i] = code
    return out
