# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled geometry kernels: exact kNN and Chamfer distance.

Same contracts as ``_numpy_impl``: exact selection, ties by lower index.
Distances are accumulated directly as sum((x - y)^2) in float64.
"""
from libc.math cimport INFINITY

import numpy as np


def knn_indices(features, int k):
    cdef double[:, ::1] f = np.ascontiguousarray(features, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t c = f.shape[1]
    out_arr = np.empty((n, k), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    best_d_arr = np.empty(k, dtype=np.float64)
    best_i_arr = np.empty(k, dtype=np.int64)
    cdef double[::1] best_d = best_d_arr
    cdef long long[::1] best_i = best_i_arr
    cdef Py_ssize_t i, j, m, pos, cc
    cdef double d, diff, worst

    with nogil:
        for i in range(n):
            for m in range(k):
                best_d[m] = INFINITY
                best_i[m] = -1
            worst = INFINITY
            for j in range(n):
                if j == i:
                    continue
                d = 0.0
                for cc in range(c):
                    diff = f[i, cc] - f[j, cc]
                    d += diff * diff
                # rows are visited in ascending j, so a strict < keeps the
                # lowest-index row among equal distances
                if d < worst:
                    pos = k - 1
                    while pos > 0 and best_d[pos - 1] > d:
                        best_d[pos] = best_d[pos - 1]
                        best_i[pos] = best_i[pos - 1]
                        pos -= 1
                    best_d[pos] = d
                    best_i[pos] = j
                    worst = best_d[k - 1]
            for m in range(k):
                out[i, m] = best_i[m]
    return out_arr


cdef double _one_sided_mean(double[:, ::1] a, double[:, ::1] b) nogil:
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t c = a.shape[1]
    cdef Py_ssize_t i, j, cc
    cdef double total = 0.0
    cdef double best, d, diff
    for i in range(na):
        best = INFINITY
        for j in range(nb):
            d = 0.0
            for cc in range(c):
                diff = a[i, cc] - b[j, cc]
                d += diff * diff
            if d < best:
                best = d
        total += best
    return total / na


def chamfer(a, b):
    cdef double[:, ::1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef double out
    with nogil:
        out = _one_sided_mean(aa, bb) + _one_sided_mean(bb, aa)
    return out


def min_sq_dists(a, b):
    cdef double[:, ::1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = aa.shape[0]
    cdef Py_ssize_t nb = bb.shape[0]
    cdef Py_ssize_t c = aa.shape[1]
    out_arr = np.empty(na, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, cc
    cdef double best, d, diff
    with nogil:
        for i in range(na):
            best = INFINITY
            for j in range(nb):
                d = 0.0
                for cc in range(c):
                    diff = aa[i, cc] - bb[j, cc]
                    d += diff * diff
                if d < best:
                    best = d
            out[i] = best
    return out_arr


def pairwise_chamfer(list set_a, list set_b):
    cdef Py_ssize_t la = len(set_a)
    cdef Py_ssize_t lb = len(set_b)
    out_arr = np.empty((la, lb), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    for i in range(la):
        for j in range(lb):
            out[i, j] = chamfer(set_a[i], set_b[j])
    return out_arr
