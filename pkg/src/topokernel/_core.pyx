# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Mirror images of the routines in ``_purecore`` with identical
tie-breaking (first index wins), so both backends pick the same SMO
pairs and assign the same WL label ids.
"""

import numpy as np

cimport numpy as cnp
from cython.operator cimport dereference as deref
from libc.math cimport isfinite
from libcpp.algorithm cimport sort as cpp_sort
from libcpp.map cimport map as cpp_map
from libcpp.vector cimport vector

cnp.import_array()

NAME = "compiled"

SMO_CONVERGED = 0
SMO_MAX_ITERATIONS = 1
SMO_STALLED = 2

cdef double _TAU = 1e-12  # curvature floor for degenerate working pairs


def bfs_distances(const cnp.int32_t[::1] indptr, const cnp.int32_t[::1] indices, int source):
    """Unweighted shortest-path distances from ``source``; -1 = unreachable."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, e
    cdef cnp.int32_t u, v, du
    dist[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return dist_arr


def total_distance_sum(const cnp.int32_t[::1] indptr, const cnp.int32_t[::1] indices):
    """Sum of d(u,v) over all ordered reachable pairs u != v."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.empty(n, dtype=np.int32)
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef long long total = 0
    cdef Py_ssize_t s, t, head, tail, e
    cdef cnp.int32_t u, v, du
    for s in range(n):
        for t in range(n):
            dist[t] = -1
        dist[s] = 0
        queue[0] = <cnp.int32_t>s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = du
                    total += du
                    queue[tail] = v
                    tail += 1
    return int(total)


def wl_relabel(const cnp.int64_t[::1] labels, const cnp.int32_t[::1] indptr,
               const cnp.int32_t[::1] indices):
    """One relabeling round: (own label, sorted neighbor labels) -> new id.

    New ids are consecutive integers from 0 in first-seen node order.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef cpp_map[vector[long long], long long] table
    cdef cpp_map[vector[long long], long long].iterator it
    cdef vector[long long] key
    cdef Py_ssize_t v, e
    cdef long long nid
    for v in range(n):
        key.clear()
        key.push_back(labels[v])
        for e in range(indptr[v], indptr[v + 1]):
            key.push_back(labels[indices[e]])
        cpp_sort(key.begin() + 1, key.end())
        it = table.find(key)
        if it == table.end():
            nid = <long long>table.size()
            table[key] = nid
        else:
            nid = deref(it).second
        out[v] = nid
    return out_arr, int(table.size())


def smo_solve(const cnp.float64_t[:, ::1] K, const cnp.float64_t[::1] y, double C,
              double tol, long long max_iterations, long long max_passes):
    """Pairwise-ascent solver for the box-constrained SVM dual.

    Same contract as the pure version: works on beta = y * alpha and
    returns (alpha, grad, iterations, status, violation, negative_curvature).
    """
    cdef Py_ssize_t n = y.shape[0]
    g_arr = np.empty(n)
    beta_arr = np.zeros(n)
    cdef double[::1] g = g_arr
    cdef double[::1] beta = beta_arr
    lo_arr = np.empty(n)
    hi_arr = np.empty(n)
    diag_arr = np.empty(n)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef double[::1] diag = diag_arr
    cdef Py_ssize_t t, i, j
    for t in range(n):
        g[t] = y[t]
        diag[t] = K[t, t]
        if y[t] > 0.0:
            lo[t] = 0.0
            hi[t] = C
        else:
            lo[t] = -C
            hi[t] = 0.0

    cdef long long it = 0, strikes = 0
    cdef int status = SMO_MAX_ITERATIONS
    cdef bint neg_curvature = False
    cdef double violation = 0.0
    cdef double m, big_m, quad, quad_j, gain, best_gain, diff, lam, step
    cdef bint found_up, found_down

    while it < max_iterations:
        found_up = False
        found_down = False
        m = 0.0
        big_m = 0.0
        i = 0
        for t in range(n):
            if beta[t] < hi[t] and (not found_up or g[t] > m):
                m = g[t]
                i = t
                found_up = True
            if beta[t] > lo[t] and (not found_down or g[t] < big_m):
                big_m = g[t]
                found_down = True
        if not found_up or not found_down:
            status = SMO_CONVERGED
            violation = 0.0
            break
        violation = m - big_m
        if violation <= tol:
            status = SMO_CONVERGED
            break

        j = -1
        best_gain = 0.0
        quad_j = _TAU
        for t in range(n):
            if beta[t] > lo[t] and g[t] < m:
                quad = diag[i] + diag[t] - 2.0 * K[i, t]
                if quad <= _TAU:
                    quad = _TAU
                diff = m - g[t]
                gain = diff * diff / quad
                if j < 0 or gain > best_gain:
                    best_gain = gain
                    j = t
                    quad_j = quad
        if j < 0:
            status = SMO_CONVERGED
            break
        if diag[i] + diag[j] - 2.0 * K[i, j] < 0.0:
            neg_curvature = True

        lam = hi[i] - beta[i]
        step = beta[j] - lo[j]
        if step < lam:
            lam = step
        step = (g[i] - g[j]) / quad_j
        if step < lam:
            lam = step
        if not (lam > 0.0) or not isfinite(lam):
            strikes += 1
            it += 1
            if strikes >= max_passes:
                status = SMO_STALLED
                break
            continue
        strikes = 0
        beta[i] += lam
        beta[j] -= lam
        # clamp round-off so bound states stay exact for later comparisons
        if beta[i] > hi[i]:
            beta[i] = hi[i]
        elif beta[i] < lo[i]:
            beta[i] = lo[i]
        if beta[j] > hi[j]:
            beta[j] = hi[j]
        elif beta[j] < lo[j]:
            beta[j] = lo[j]
        for t in range(n):
            g[t] -= lam * (K[i, t] - K[j, t])
        it += 1

    alpha_arr = np.asarray(y) * beta_arr
    if violation < 0.0:
        violation = 0.0
    return alpha_arr, g_arr, int(it), int(status), violation, bool(neg_curvature)
