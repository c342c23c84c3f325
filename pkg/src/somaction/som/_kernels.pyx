# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled training kernel for the map adaptation inner loop.

Semantics must match _kernels_py.run_training exactly (same update order,
same neighborhood formula, renormalization after every presentation).
"""

from libc.math cimport exp, sqrt

import numpy as np

cimport numpy as cnp


def run_training(double[:, ::1] weights, double[:, ::1] inputs,
                 cnp.int64_t[::1] order, double[::1] alphas,
                 double[::1] sigmas, const double[:, ::1] grid_dist,
                 bint squared, bint normalize=True):
    cdef Py_ssize_t n_units = weights.shape[0]
    cdef Py_ssize_t dim = weights.shape[1]
    cdef Py_ssize_t n_steps = order.shape[0]
    cdef Py_ssize_t step, u, k, c
    cdef cnp.int64_t idx
    cdef double d2, best, diff, a, s2, e, g, norm

    for step in range(n_steps):
        idx = order[step]
        # best matching unit: argmin squared distance, first wins ties
        best = -1.0
        c = 0
        for u in range(n_units):
            d2 = 0.0
            for k in range(dim):
                diff = inputs[idx, k] - weights[u, k]
                d2 += diff * diff
            if best < 0.0 or d2 < best:
                best = d2
                c = u
        a = alphas[step]
        s2 = 2.0 * sigmas[step] * sigmas[step]
        for u in range(n_units):
            e = grid_dist[c, u]
            if squared:
                e = e * e
            g = a * exp(-e / s2)
            norm = 0.0
            for k in range(dim):
                weights[u, k] += g * (inputs[idx, k] - weights[u, k])
                norm += weights[u, k] * weights[u, k]
            if normalize:
                norm = sqrt(norm)
                if norm < 1e-300:
                    norm = 1e-300
                for k in range(dim):
                    weights[u, k] /= norm
