# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the hot grid loops (conjugate scans and slab reductions)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, INFINITY

IMPL = "cython"


def conj_batch(cnp.ndarray[cnp.float64_t, ndim=2] pot,
               cnp.ndarray[cnp.float64_t, ndim=1] x,
               cnp.ndarray[cnp.float64_t, ndim=1] y):
    cdef Py_ssize_t nb = pot.shape[0]
    cdef Py_ssize_t nx = pot.shape[1]
    cdef Py_ssize_t ny = y.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nb, ny))
    cdef Py_ssize_t b, j, k
    cdef double yj, best, v, p
    for b in range(nb):
        for j in range(ny):
            yj = y[j]
            best = -INFINITY
            for k in range(nx):
                p = pot[b, k]
                if p == INFINITY:
                    continue
                v = x[k] * yj - p
                if v > best:
                    best = v
            out[b, j] = best
    return out


def slab_max(cnp.ndarray[cnp.float64_t, ndim=1] base,
             cnp.ndarray[cnp.float64_t, ndim=1] cross,
             double scale):
    cdef Py_ssize_t n = base.shape[0]
    cdef double best = -INFINITY
    cdef double v
    cdef Py_ssize_t i
    for i in range(n):
        if base[i] == -INFINITY:
            continue
        v = base[i] + scale * cross[i]
        if v > best:
            best = v
    return best


def slab_sum_exp(cnp.ndarray[cnp.float64_t, ndim=1] w,
                 cnp.ndarray[cnp.float64_t, ndim=1] base,
                 cnp.ndarray[cnp.float64_t, ndim=1] cross,
                 double scale,
                 cnp.ndarray[cnp.uint8_t, ndim=1] edge):
    cdef Py_ssize_t n = base.shape[0]
    cdef double total = 0.0
    cdef double shell = 0.0
    cdef double v
    cdef Py_ssize_t i
    for i in range(n):
        if base[i] == -INFINITY:
            continue
        v = w[i] * exp(base[i] + scale * cross[i])
        total += v
        if edge[i]:
            shell += v
    return total, shell
