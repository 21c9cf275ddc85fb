"""Regenerate the committed DEMO2C dataset (TU flat-file format).

Two classes of Erdos-Renyi graphs, sparse (p=0.2) vs dense (p=0.7), with
degree-bucket node labels.  The generation is fully seeded, so rerunning
this script reproduces the committed files byte for byte.
"""

import argparse
import os

import numpy as np

from topokernel.graphs import erdos_renyi


def build_graphs(per_class, seed):
    rng = np.random.default_rng(seed)
    graphs = []
    labels = []
    for i in range(per_class):
        n_sparse = int(rng.integers(10, 17))
        n_dense = int(rng.integers(10, 17))
        graphs.append(erdos_renyi(n_sparse, 0.2, seed + 2 * i))
        labels.append(1)
        graphs.append(erdos_renyi(n_dense, 0.7, seed + 2 * i + 1))
        labels.append(2)
    return graphs, labels


def write_dataset(directory, name, graphs, labels):
    os.makedirs(directory, exist_ok=True)

    def path(suffix):
        return os.path.join(directory, f"{name}_{suffix}.txt")

    offset = 0
    with open(path("A"), "w", newline="\n") as fh:
        for g in graphs:
            for u in range(g.node_count):
                for v in g.neighbors(u):
                    fh.write(f"{offset + u + 1}, {offset + v + 1}\n")
            offset += g.node_count
    with open(path("graph_indicator"), "w", newline="\n") as fh:
        for gi, g in enumerate(graphs):
            fh.write(f"{gi + 1}\n" * g.node_count)
    with open(path("graph_labels"), "w", newline="\n") as fh:
        for lab in labels:
            fh.write(f"{lab}\n")
    with open(path("node_labels"), "w", newline="\n") as fh:
        for g in graphs:
            for deg in g.degrees:
                fh.write(f"{int(deg) // 2}\n")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data", help="dataset root directory")
    parser.add_argument("--name", default="DEMO2C")
    parser.add_argument("--per-class", type=int, default=30)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args(argv)

    graphs, labels = build_graphs(args.per_class, args.seed)
    directory = os.path.join(args.out, args.name)
    write_dataset(directory, args.name, graphs, labels)
    nodes = sum(g.node_count for g in graphs)
    edges = sum(g.edge_count for g in graphs)
    print(
        f"wrote {len(graphs)} graphs ({nodes} nodes, {edges} edges) to {directory}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
