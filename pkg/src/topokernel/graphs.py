"""Graph representation, TU-format dataset ingestion, and path primitives.

Graphs are immutable, undirected, simple, with optional integer node
labels.  Adjacency is stored CSR-style (``indptr``/``indices``) with each
neighbor list sorted ascending, which is what the index computations and
the compiled kernels consume directly.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backend
from .errors import DatasetError, DatasetFormatError, UnsupportedDatasetError

#: Sentinel used in distance rows for nodes in another component.
UNREACHABLE = -1


class Graph:
    """Immutable undirected simple graph over nodes 0..n-1."""

    __slots__ = ("node_count", "indptr", "indices", "node_labels")

    def __init__(self, node_count, indptr, indices, node_labels=None):
        # copy so freezing the arrays never flips a caller's writeable flag
        indptr = np.array(indptr, dtype=np.int32, order="C")
        indices = np.array(indices, dtype=np.int32, order="C")
        _validate_csr(node_count, indptr, indices)
        if node_labels is not None:
            node_labels = np.array(node_labels, dtype=np.int64, order="C")
            if node_labels.shape != (node_count,):
                raise ValueError(
                    f"node_labels has length {node_labels.size}, expected {node_count}"
                )
            node_labels.flags.writeable = False
        indptr.flags.writeable = False
        indices.flags.writeable = False
        self.node_count = int(node_count)
        self.indptr = indptr
        self.indices = indices
        self.node_labels = node_labels

    @classmethod
    def from_edges(cls, node_count, edges, node_labels=None):
        """Build a graph from an iterable of (u, v) pairs.

        Edges may appear in either or both directions and with repeats;
        they are deduplicated and symmetrized.  Self-loops are rejected.
        """
        n = int(node_count)
        pairs = np.asarray(list(edges), dtype=np.int64)
        if pairs.size == 0:
            pairs = pairs.reshape(0, 2)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError("edges must be (u, v) pairs")
        u, v = pairs[:, 0], pairs[:, 1]
        if pairs.size and (u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n):
            raise ValueError(f"edge endpoint out of range [0, {n})")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        # canonicalize, dedupe, then store both directions
        a = np.minimum(u, v)
        b = np.maximum(u, v)
        keys = np.unique(a * n + b)
        a, b = keys // n, keys % n
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        order = np.argsort(src * n + dst, kind="stable")
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst, node_labels)

    @property
    def edge_count(self):
        return self.indices.size // 2

    @property
    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_matrix(self):
        """Dense symmetric 0/1 adjacency as float64."""
        a = np.zeros((self.node_count, self.node_count))
        if self.indices.size:
            rows = np.repeat(np.arange(self.node_count), self.degrees)
            a[rows, self.indices] = 1.0
        return a

    def permuted(self, perm):
        """Relabeled copy: node v becomes perm[v]."""
        perm = np.asarray(perm, dtype=np.int64)
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        edges = np.column_stack([perm[rows], perm[self.indices]])
        labels = None
        if self.node_labels is not None:
            labels = np.empty_like(self.node_labels)
            labels[perm] = self.node_labels
        return Graph.from_edges(self.node_count, edges[edges[:, 0] < edges[:, 1]], labels)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        same_labels = (
            (self.node_labels is None and other.node_labels is None)
            or (
                self.node_labels is not None
                and other.node_labels is not None
                and np.array_equal(self.node_labels, other.node_labels)
            )
        )
        return (
            self.node_count == other.node_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and same_labels
        )

    def __repr__(self):
        lab = "labeled" if self.node_labels is not None else "unlabeled"
        return f"Graph(n={self.node_count}, m={self.edge_count}, {lab})"


def _validate_csr(n, indptr, indices):
    if n < 0:
        raise ValueError("node_count must be non-negative")
    if indptr.shape != (n + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
        raise ValueError("malformed indptr")
    if np.any(np.diff(indptr) < 0):
        raise ValueError("indptr must be non-decreasing")
    if indices.size == 0:
        return
    if indices.min() < 0 or indices.max() >= n:
        raise ValueError("neighbor index out of range")
    starts = np.zeros(indices.size, dtype=bool)
    starts[indptr[1:-1][indptr[1:-1] < indices.size]] = True
    within = ~starts[1:]
    if np.any(np.diff(indices)[within] <= 0):
        raise ValueError("neighbor lists must be sorted and duplicate-free")
    rows = np.repeat(np.arange(n), np.diff(indptr))
    if np.any(rows == indices):
        raise ValueError("self-loops are not allowed")
    fwd = np.sort(rows * n + indices)
    rev = np.sort(indices * n + rows)
    if not np.array_equal(fwd, rev):
        raise ValueError("adjacency is not symmetric")


@dataclass(frozen=True)
class Dataset:
    """Named graph collection with class labels in {-1, +1}."""

    name: str
    graphs: tuple
    class_labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = np.array(self.class_labels, dtype=np.int64, order="C")
        if len(self.graphs) != labels.size or labels.size < 1:
            raise ValueError("graphs and class_labels must have equal length >= 1")
        if not np.all(np.isin(labels, (-1, 1))):
            raise ValueError("class labels must be -1 or +1")
        labels.flags.writeable = False
        object.__setattr__(self, "graphs", tuple(self.graphs))
        object.__setattr__(self, "class_labels", labels)

    def __len__(self):
        return len(self.graphs)


@dataclass(frozen=True)
class DistanceRow:
    """Single-source shortest-path distances; UNREACHABLE marks other components."""

    source: int
    dist: np.ndarray


def _read_int_lines(path, what):
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(int(text))
            except ValueError:
                raise DatasetFormatError(path, line_no, f"expected integer {what}, got {text!r}")
    return values


def load_tu_dataset(directory, name):
    """Load a TU-format dataset from flat files in ``directory``.

    Expects ``<name>_A.txt`` (comma-separated 1-based edge pairs),
    ``<name>_graph_indicator.txt`` and ``<name>_graph_labels.txt``;
    ``<name>_node_labels.txt`` is attached when present.  Original class
    labels are remapped deterministically: smaller value -> -1.
    """
    directory = Path(directory)
    paths = {
        kind: directory / f"{name}_{kind}.txt"
        for kind in ("A", "graph_indicator", "graph_labels", "node_labels")
    }
    for kind in ("A", "graph_indicator", "graph_labels"):
        if not paths[kind].is_file():
            raise DatasetError(f"missing dataset file: {paths[kind]}")

    indicator = _read_int_lines(paths["graph_indicator"], "graph id")
    n_nodes = len(indicator)
    n_graphs = max(indicator) if indicator else 0
    node_graph = np.asarray(indicator, dtype=np.int64) - 1
    if n_nodes and (node_graph.min() < 0 or n_graphs < 1):
        bad = int(np.flatnonzero(node_graph < 0)[0]) + 1
        raise DatasetFormatError(paths["graph_indicator"], bad, "graph ids must be >= 1")

    # local node index = position within its graph, in file order
    local = np.zeros(n_nodes, dtype=np.int64)
    sizes = np.zeros(n_graphs, dtype=np.int64)
    for i, gid in enumerate(node_graph):
        local[i] = sizes[gid]
        sizes[gid] += 1

    raw_labels = _read_int_lines(paths["graph_labels"], "graph label")
    if len(raw_labels) != n_graphs:
        raise DatasetFormatError(
            paths["graph_labels"], len(raw_labels) + 1,
            f"expected {n_graphs} graph labels, found {len(raw_labels)}",
        )
    distinct = sorted(set(raw_labels))
    if len(distinct) > 2:
        raise UnsupportedDatasetError(
            f"{name}: {len(distinct)} distinct class labels; only binary datasets are supported"
        )
    if len(distinct) == 2:
        remap = {distinct[0]: -1, distinct[1]: 1}
    else:
        remap = {distinct[0]: 1}  # degenerate single-class source
    class_labels = np.asarray([remap[v] for v in raw_labels], dtype=np.int64)

    node_labels = None
    if paths["node_labels"].is_file():
        values = _read_int_lines(paths["node_labels"], "node label")
        if len(values) != n_nodes:
            raise DatasetFormatError(
                paths["node_labels"], len(values) + 1,
                f"expected {n_nodes} node labels, found {len(values)}",
            )
        node_labels = np.asarray(values, dtype=np.int64)

    per_graph_edges = [[] for _ in range(n_graphs)]
    with open(paths["A"], "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise DatasetFormatError(paths["A"], line_no, f"expected 'u, v', got {text!r}")
            try:
                u = int(parts[0].strip())
                v = int(parts[1].strip())
            except ValueError:
                raise DatasetFormatError(paths["A"], line_no, f"non-integer endpoint in {text!r}")
            if not (1 <= u <= n_nodes) or not (1 <= v <= n_nodes):
                raise DatasetFormatError(
                    paths["A"], line_no, f"node index out of range 1..{n_nodes}: {text!r}"
                )
            gu, gv = node_graph[u - 1], node_graph[v - 1]
            if gu != gv:
                raise DatasetFormatError(paths["A"], line_no, "edge endpoints in different graphs")
            if u == v:
                raise DatasetFormatError(paths["A"], line_no, "self-loop")
            per_graph_edges[gu].append((local[u - 1], local[v - 1]))

    graphs = []
    for gid in range(n_graphs):
        labels = None
        if node_labels is not None:
            labels = node_labels[node_graph == gid]
        graphs.append(Graph.from_edges(int(sizes[gid]), per_graph_edges[gid], labels))
    return Dataset(name=name, graphs=tuple(graphs), class_labels=class_labels)


def erdos_renyi(n, p, seed):
    """Seeded G(n, p): each unordered pair kept independently with prob. p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    return Graph.from_edges(n, np.column_stack([iu[mask], ju[mask]]))


def bfs_distances(g, source):
    """Exact unweighted distances from ``source`` (UNREACHABLE elsewhere)."""
    if not 0 <= source < g.node_count:
        raise ValueError(f"source {source} out of range [0, {g.node_count})")
    dist = backend.bfs_distances(g.indptr, g.indices, int(source))
    dist.flags.writeable = False
    return DistanceRow(source=int(source), dist=dist)


def connected_components(g):
    """Partition of node indices into components, ordered by smallest member."""
    seen = np.zeros(g.node_count, dtype=bool)
    components = []
    for start in range(g.node_count):
        if seen[start]:
            continue
        row = backend.bfs_distances(g.indptr, g.indices, start)
        members = np.flatnonzero(row >= 0)
        seen[members] = True
        components.append(members)
    return components
