"""Shared fixtures: reference oracles, graph builders, and a TU writer.

Oracles are deliberately naive re-implementations (dense Floyd-Warshall,
edge loops, Taylor-series trace, projected-gradient QP) used to check the
fast production code against independent ground truth.
"""

import numpy as np
import pytest

from topokernel.graphs import Dataset, Graph, erdos_renyi


def floyd_warshall(adjacency):
    """Dense all-pairs shortest paths; np.inf marks unreachable pairs."""
    n = adjacency.shape[0]
    dist = np.where(adjacency > 0, 1.0, np.inf)
    np.fill_diagonal(dist, 0.0)
    for k in range(n):
        dist = np.minimum(dist, dist[:, [k]] + dist[[k], :])
    return dist


def wiener_oracle(g):
    dist = floyd_warshall(g.adjacency_matrix())
    finite = dist[np.isfinite(dist)]
    return float(finite.sum()) / 2.0


def randic_oracle(g):
    deg = g.degrees
    total = 0.0
    for u in range(g.node_count):
        for v in g.neighbors(u):
            if u < v:
                total += 1.0 / np.sqrt(deg[u] * deg[v])
    return total


def estrada_taylor_oracle(g, terms=60):
    """tr(e^A) via the truncated Taylor series sum_k tr(A^k)/k!."""
    a = g.adjacency_matrix()
    power = np.eye(a.shape[0])
    total = float(np.trace(power))
    factorial = 1.0
    for k in range(1, terms + 1):
        power = power @ a
        factorial *= k
        total += float(np.trace(power)) / factorial
    return total


def qp_oracle_solve(K, y, C, iterations=200000, step=None, stop_violation=1e-9):
    """Projected-gradient ascent on the SVM dual, run to high precision.

    The feasible set {0 <= a <= C, y.a = 0} is projected exactly by
    bisection on the shift nu in clip(z + nu*y, 0, C).  Iteration stops
    when the first-order optimality violation max-over-movable-up minus
    min-over-movable-down drops below stop_violation; the objective error
    is then at most stop_violation * n * C, far below comparison tolerances.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    q = (y[:, None] * y[None, :]) * K
    margin = 1e-10 * max(C, 1.0)

    def project(z):
        # s(nu) = y.clip(z + nu*y, 0, C) is piecewise-linear and
        # nondecreasing; interpolating between its breakpoints is exact.
        bps = np.sort(np.concatenate([-z * y, (C - z) * y]))
        values = [float(y @ np.clip(z + nu * y, 0.0, C)) for nu in bps]
        nu = bps[-1]
        if values[0] >= 0.0:
            nu = bps[0]
        else:
            for t in range(1, len(bps)):
                if values[t] >= 0.0:
                    lo_b, hi_b = bps[t - 1], bps[t]
                    lo_s, hi_s = values[t - 1], values[t]
                    nu = lo_b + (0.0 - lo_s) * (hi_b - lo_b) / (hi_s - lo_s)
                    break
        return np.clip(z + nu * y, 0.0, C)

    if step is None:
        eig = np.linalg.eigvalsh(q)
        step = 1.0 / max(float(eig[-1]), 1e-9)
    alpha = project(np.zeros(n))
    for _ in range(iterations):
        grad = 1.0 - q @ alpha
        g = y * grad
        beta = y * alpha
        hi = np.where(y > 0.0, C, 0.0)
        lo = hi - C
        up = beta < hi - margin
        down = beta > lo + margin
        m = g[up].max() if up.any() else -np.inf
        big_m = g[down].min() if down.any() else np.inf
        if m - big_m <= stop_violation:
            break
        new = project(alpha + step * grad)
        if np.max(np.abs(new - alpha)) < 1e-15:
            alpha = new
            break
        alpha = new
    objective = float(np.sum(alpha) - 0.5 * alpha @ q @ alpha)
    return alpha, objective


def random_psd_problem(rng, n):
    """Random PSD kernel (ridge-regularized AA') with mixed labels."""
    a = rng.normal(size=(n, max(1, n // 2)))
    k = a @ a.T + 0.1 * np.eye(n)
    labels = np.ones(n)
    labels[rng.permutation(n)[: n // 2]] = -1.0
    if np.all(labels == labels[0]):
        labels[0] = -labels[0]
    return k, labels


def kkt_violations(k, y, alpha, bias, C, tol):
    """Count points violating the KKT conditions by more than tol."""
    margins = y * ((alpha * y) @ k + bias)
    eps = 1e-8 * max(C, 1.0)
    count = 0
    for i in range(y.shape[0]):
        if alpha[i] <= eps:
            if margins[i] < 1.0 - tol:
                count += 1
        elif alpha[i] >= C - eps:
            if margins[i] > 1.0 + tol:
                count += 1
        elif abs(margins[i] - 1.0) > tol:
            count += 1
    return count


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n):
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def write_tu_dataset(directory, name, graphs, labels, node_labels=None):
    """Write graphs in TU flat-file format (1-based ids, both edge dirs)."""
    directory.mkdir(parents=True, exist_ok=True)
    offsets = np.cumsum([0] + [g.node_count for g in graphs])
    with open(directory / f"{name}_A.txt", "w") as fh:
        for gi, g in enumerate(graphs):
            base = offsets[gi]
            for u in range(g.node_count):
                for v in g.neighbors(u):
                    fh.write(f"{base + u + 1}, {base + v + 1}\n")
    with open(directory / f"{name}_graph_indicator.txt", "w") as fh:
        for gi, g in enumerate(graphs):
            fh.write(f"{gi + 1}\n" * g.node_count)
    with open(directory / f"{name}_graph_labels.txt", "w") as fh:
        for lab in labels:
            fh.write(f"{lab}\n")
    if node_labels is not None:
        with open(directory / f"{name}_node_labels.txt", "w") as fh:
            for per_graph in node_labels:
                for lab in per_graph:
                    fh.write(f"{lab}\n")
    return directory


def separable_graphs(n_per_class=20, seed=7):
    """Sparse vs dense ER graphs: trivially separable by any index."""
    graphs = []
    labels = []
    for i in range(n_per_class):
        graphs.append(erdos_renyi(12, 0.15, seed + i))
        labels.append(-1)
        graphs.append(erdos_renyi(12, 0.75, 10 * seed + i))
        labels.append(1)
    return graphs, np.array(labels, dtype=np.int64)


@pytest.fixture(scope="session")
def toy_dataset():
    graphs, labels = separable_graphs()
    return Dataset(name="toy", graphs=tuple(graphs), class_labels=labels)


@pytest.fixture(scope="session")
def er_battery():
    """Seeded ER graphs across sizes and densities for oracle sweeps."""
    graphs = []
    seed = 0
    for p in (0.1, 0.3, 0.6):
        for n in (5, 10, 18, 26, 30):
            for _ in range(4):
                graphs.append(erdos_renyi(n, p, seed))
                seed += 1
    return graphs
