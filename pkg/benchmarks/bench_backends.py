"""Compare the pure-Python and compiled backends on the hot kernels.

Times all-pairs BFS distance sums, single-source BFS, WL relabeling
rounds, and the SMO solver on seeded inputs, printing one row per
routine with the speedup of the compiled extension.
"""

import argparse
import time

import numpy as np

from topokernel import backend
from topokernel.graphs import erdos_renyi


def best_of(fn, repetitions):
    best = float("inf")
    for _ in range(repetitions):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def smo_problem(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 4))
    sq = np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=2)
    k = np.ascontiguousarray(np.exp(-0.5 * sq))
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    return k, np.ascontiguousarray(y)


def build_cases(args):
    dense = erdos_renyi(args.bfs_nodes, 0.1, seed=1)
    sparse = erdos_renyi(args.wl_nodes, 4.0 / args.wl_nodes, seed=2)
    labels = np.zeros(sparse.node_count, dtype=np.int64)
    k, y = smo_problem(args.smo_points, seed=3)

    def wl_rounds(impl):
        lab = labels
        for _ in range(3):
            lab, _ = impl.wl_relabel(np.asarray(lab), sparse.indptr, sparse.indices)
        return lab

    return [
        (
            f"all-pairs BFS sum (n={dense.node_count}, m={dense.edge_count})",
            lambda impl: impl.total_distance_sum(dense.indptr, dense.indices),
        ),
        (
            f"single-source BFS (n={dense.node_count})",
            lambda impl: impl.bfs_distances(dense.indptr, dense.indices, 0),
        ),
        (
            f"WL relabel x3 (n={sparse.node_count}, m={sparse.edge_count})",
            wl_rounds,
        ),
        (
            f"SMO solve (n={args.smo_points})",
            lambda impl: impl.smo_solve(k, y, 1.0, 1e-3, 1000 * args.smo_points, 10),
        ),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=5, help="take the best of this many runs")
    parser.add_argument("--bfs-nodes", type=int, default=400)
    parser.add_argument("--wl-nodes", type=int, default=2000)
    parser.add_argument("--smo-points", type=int, default=300)
    args = parser.parse_args(argv)

    names = backend.available_backends()
    if "compiled" not in names:
        print("compiled extension not built; timing the pure backend only")
    impls = {name: backend.get_backend(name) for name in names}

    width = max(len(label) for label, _ in build_cases(args))
    header = f"{'routine':<{width}}  " + "".join(f"{n:>12}" for n in names)
    if "compiled" in names:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, run in build_cases(args):
        times = {name: best_of(lambda: run(impl), args.reps) for name, impl in impls.items()}
        row = f"{label:<{width}}  " + "".join(f"{times[n]:>11.5f}s" for n in names)
        if "compiled" in names:
            row += f"{times['pure'] / times['compiled']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
