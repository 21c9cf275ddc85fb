"""Pure-Python/NumPy implementations of the hot kernels.

Mirror images of the routines in the compiled ``_core`` extension; the
backend module picks one set at import time.  Tie-breaking (first index
wins) is kept identical so both backends pick the same SMO pairs and the
same label ids.
"""

from collections import deque

import numpy as np

NAME = "pure"

SMO_CONVERGED = 0
SMO_MAX_ITERATIONS = 1
SMO_STALLED = 2

_TAU = 1e-12  # curvature floor for degenerate working pairs


def bfs_distances(indptr, indices, source):
    """Unweighted shortest-path distances from ``source``; -1 = unreachable."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    ind = indices.tolist()
    ptr = indptr.tolist()
    queue = deque([source])
    reach = dist.tolist()
    while queue:
        u = queue.popleft()
        du = reach[u] + 1
        for v in ind[ptr[u]:ptr[u + 1]]:
            if reach[v] < 0:
                reach[v] = du
                queue.append(v)
    return np.asarray(reach, dtype=np.int32)


def total_distance_sum(indptr, indices):
    """Sum of d(u,v) over all ordered reachable pairs u != v."""
    n = indptr.shape[0] - 1
    ind = indices.tolist()
    ptr = indptr.tolist()
    adj = [ind[ptr[u]:ptr[u + 1]] for u in range(n)]
    total = 0
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = du
                    total += du
                    queue.append(v)
    return total


def wl_relabel(labels, indptr, indices):
    """One relabeling round: (own label, sorted neighbor labels) -> new id.

    New ids are consecutive integers from 0 in first-seen node order, so
    repeated runs over the same batch are reproducible.
    """
    n = indptr.shape[0] - 1
    lab = labels.tolist()
    ind = indices.tolist()
    ptr = indptr.tolist()
    table = {}
    out = [0] * n
    for v in range(n):
        key = (lab[v], tuple(sorted(lab[w] for w in ind[ptr[v]:ptr[v + 1]])))
        nid = table.get(key)
        if nid is None:
            nid = len(table)
            table[key] = nid
        out[v] = nid
    return np.asarray(out, dtype=np.int64), len(table)


def smo_solve(K, y, C, tol, max_iterations, max_passes):
    """Pairwise-ascent solver for the box-constrained SVM dual.

    Works on beta = y * alpha, each beta_i boxed to [lo_i, hi_i] with the
    balance constraint sum(beta) preserved by every paired update.  The
    working pair is the maximally violating coordinate plus the partner
    with the best second-order gain.

    Returns (alpha, grad, iterations, status, violation, negative_curvature)
    where ``grad`` is the gradient of the dual objective in beta space
    (used by the caller to recover the bias).
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    lo = np.where(y > 0.0, 0.0, -C)
    hi = np.where(y > 0.0, C, 0.0)
    beta = np.zeros(n)
    g = y.copy()
    diag = np.ascontiguousarray(np.diagonal(K))
    strikes = 0
    status = SMO_MAX_ITERATIONS
    violation = 0.0
    neg_curvature = False
    it = 0
    while it < max_iterations:
        up = beta < hi
        down = beta > lo
        gi = np.where(up, g, -np.inf)
        i = int(np.argmax(gi))
        m = gi[i]
        gj = np.where(down, g, np.inf)
        big_m = float(np.min(gj))
        if not np.isfinite(m) or not np.isfinite(big_m):
            status = SMO_CONVERGED
            violation = 0.0
            break
        violation = m - big_m
        if violation <= tol:
            status = SMO_CONVERGED
            break
        cand = down & (g < m)
        quad = diag[i] + diag - 2.0 * K[i]
        quad_floored = np.where(quad > _TAU, quad, _TAU)
        diff = m - g
        gain = np.where(cand, diff * diff / quad_floored, -np.inf)
        j = int(np.argmax(gain))
        if quad[j] < 0.0:
            neg_curvature = True
        quad = quad_floored
        lam = min(hi[i] - beta[i], beta[j] - lo[j], (g[i] - g[j]) / quad[j])
        if not (lam > 0.0) or not np.isfinite(lam):
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
        g -= lam * (K[i] - K[j])
        it += 1
    alpha = y * beta
    return alpha, g, it, status, max(violation, 0.0), neg_curvature
