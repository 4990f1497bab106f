# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`vidsal._pykernels`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


def density_accumulate(const double[::1] xs, const double[::1] ys, const double[::1] weights,
                       Py_ssize_t width, Py_ssize_t height, double sigma_d):
    # the sum of separable outer products gy[f] (x) gx[f] is one GEMM: out = gy^T gx
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t f, k, x, y
    cdef double inv = 1.0 / (2.0 * sigma_d * sigma_d)
    cdef double d, w
    out_arr = np.zeros((height, width), dtype=np.float64)
    k = 0
    for f in range(n):
        if weights[f] != 0.0:
            k += 1
    if k == 0 or width == 0 or height == 0:
        return out_arr
    gx_arr = np.empty((k, width), dtype=np.float64)
    gy_arr = np.empty((k, height), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] gx = gx_arr
    cdef double[:, ::1] gy = gy_arr
    k = 0
    for f in range(n):
        w = weights[f]
        if w == 0.0:
            continue
        for x in range(width):
            d = x - xs[f]
            gx[k, x] = exp(-d * d * inv)
        for y in range(height):
            d = y - ys[f]
            gy[k, y] = exp(-d * d * inv) * w
        k += 1
    # column-major view: out^T (W x H) = gx^T (W x k) . gy (k x H)
    cdef char transa = b'N'
    cdef char transb = b'T'
    cdef int mm = <int>width, nn = <int>height, kk = <int>k
    cdef double alpha = 1.0, beta = 0.0
    dgemm(&transa, &transb, &mm, &nn, &kk, &alpha, &gx[0, 0], &mm, &gy[0, 0], &nn, &beta, &out[0, 0], &mm)
    return out_arr


def pairwise_intersection(const double[:, ::1] stack):
    cdef Py_ssize_t m = stack.shape[0]
    cdef Py_ssize_t n = stack.shape[1]
    cdef Py_ssize_t i, j, p
    cdef double acc, a, b
    out_arr = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(m):
        acc = 0.0
        for p in range(n):
            acc += stack[i, p]
        out[i, i] = acc
        for j in range(i + 1, m):
            acc = 0.0
            for p in range(n):
                a = stack[i, p]
                b = stack[j, p]
                acc += a if a < b else b
            out[i, j] = acc
            out[j, i] = acc
    return out_arr


def enumerate_objectives(const double[:, ::1] sim, double lambda_d, double eps):
    cdef Py_ssize_t m = sim.shape[0]
    cdef Py_ssize_t total = (<Py_ssize_t>1 << m) - 1
    cdef Py_ssize_t mask, i, j, a, b, n_sel, n_unsel
    cdef double rep_num, div_num, best, s
    cdef Py_ssize_t sel[64]
    cdef Py_ssize_t unsel[64]
    out_arr = np.empty(total, dtype=np.float64)
    cdef double[::1] out = out_arr
    for mask in range(1, total + 1):
        n_sel = 0
        n_unsel = 0
        for i in range(m):
            if (mask >> i) & 1:
                sel[n_sel] = i
                n_sel += 1
            else:
                unsel[n_unsel] = i
                n_unsel += 1
        rep_num = 0.0
        for a in range(n_unsel):
            i = unsel[a]
            best = 0.0
            for b in range(n_sel):
                s = sim[i, sel[b]]
                if s > best:
                    best = s
            rep_num += best
        div_num = 0.0
        for a in range(n_sel):
            i = sel[a]
            for b in range(n_sel):
                if b != a:
                    div_num += 1.0 - sim[i, sel[b]]
        out[mask - 1] = (rep_num / (n_unsel + eps)
                         + lambda_d * div_num / (n_sel * (n_sel - 1) + eps))
    return out_arr
