"""Gram matrix builders: single-index RBF, EFV, LCTK, and WL subtree.

RBF-based Gram matrices are built on standardized fingerprint columns and
satisfy: exact unit diagonal, entries in [0, 1], symmetry, and numerical
positive semidefiniteness.  The WL subtree Gram is a raw histogram dot
product and is exempt from the [0, 1]/unit-diagonal range contract.
"""

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import backend
from ._fmt import fmt17
from .indices import CANONICAL_SCHEMA


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix plus provenance (method tag and parameters)."""

    values: np.ndarray = field(repr=False)
    method: str
    params: dict

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("Gram matrix must be square")
        object.__setattr__(self, "values", v)

    @property
    def size(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class StandardizationStats:
    """Per-feature mean and (floored) standard deviation from training rows."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, features):
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        return (features - self.mean) / self.std


@dataclass(frozen=True)
class LctkWeights:
    """Convex-combination weights aligned to (wiener, estrada, randic)."""

    w: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.w)
        if len(w) != 3:
            raise ValueError("LCTK takes exactly 3 weights")
        if any(x < 0.0 for x in w):
            raise ValueError("weights must be non-negative")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 (got {sum(w)!r})")
        object.__setattr__(self, "w", w)


#: The seven weight vectors swept by the default grid search.
DEFAULT_WEIGHT_VECTORS = (
    (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    (0.5, 0.3, 0.2),
    (0.2, 0.5, 0.3),
    (0.3, 0.2, 0.5),
    (0.8, 0.1, 0.1),
    (0.1, 0.8, 0.1),
    (0.1, 0.1, 0.8),
)


def rbf(x, y, gamma):
    """Gaussian kernel exp(-gamma * ||x - y||^2)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if gamma < 0.0:
        raise ValueError("gamma must be non-negative")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def fit_standardizer(train_features):
    """Column means/stds over training rows; stds below 1e-12 floored to 1."""
    x = np.atleast_2d(np.asarray(train_features, dtype=np.float64))
    if x.shape[0] < 1:
        raise ValueError("need at least one training row")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return StandardizationStats(mean=mean, std=std)


def squared_distances(x, y=None):
    """Pairwise squared Euclidean distances between rows of x and y.

    When y is None the result is made exactly symmetric with a zero
    diagonal (self-distances carry no round-off into the kernel).
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    symmetric = y is None
    y = x if symmetric else np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise ValueError("feature dimension mismatch")
    sq_x = np.einsum("ij,ij->i", x, x)
    sq_y = sq_x if symmetric else np.einsum("ij,ij->i", y, y)
    d = sq_x[:, None] + sq_y[None, :] - 2.0 * (x @ y.T)
    np.maximum(d, 0.0, out=d)
    if symmetric:
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
    return d


def rbf_gram_values(features, gamma, sqdist=None):
    """Plain ndarray RBF Gram over rows of ``features``."""
    if gamma < 0.0:
        raise ValueError("gamma must be non-negative")
    d = squared_distances(features) if sqdist is None else sqdist
    k = np.exp(-gamma * d)
    np.fill_diagonal(k, 1.0)
    return k


def rbf_cross_values(features_a, features_b, gamma):
    """RBF kernel rows K(a_i, b_j) between two row sets."""
    if gamma < 0.0:
        raise ValueError("gamma must be non-negative")
    return np.exp(-gamma * squared_distances(features_a, features_b))


def gram_single(features, gamma, index=None):
    """Single-index RBF Gram; ``features`` is the standardized n x 1 column."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    if features.shape[1] != 1:
        raise ValueError("single-index Gram takes one feature column")
    name = index if index is not None else "single"
    return GramMatrix(
        values=rbf_gram_values(features, gamma),
        method=name,
        params={"gamma": float(gamma)},
    )


def gram_efv(features, gamma):
    """One RBF kernel over the concatenated (standardized) fingerprint rows."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    return GramMatrix(
        values=rbf_gram_values(features, gamma),
        method="efv",
        params={"gamma": float(gamma), "dim": features.shape[1]},
    )


def gram_lctk(per_index_columns, weights, gammas):
    """Convex combination of the three single-index RBF Grams.

    ``per_index_columns`` holds one standardized column per index in
    canonical order; ``gammas`` gives the bandwidth for each component.
    """
    if not isinstance(weights, LctkWeights):
        weights = LctkWeights(w=tuple(weights))
    gammas = tuple(float(g) for g in gammas)
    cols = [np.asarray(c, dtype=np.float64).reshape(-1, 1) for c in per_index_columns]
    if len(cols) != 3 or len(gammas) != 3:
        raise ValueError("LCTK needs three feature columns and three gammas")
    n = cols[0].shape[0]
    k = np.zeros((n, n))
    for w, col, gamma in zip(weights.w, cols, gammas):
        k += w * rbf_gram_values(col, gamma)
    np.fill_diagonal(k, 1.0)  # exact: convex combination of unit diagonals
    return GramMatrix(
        values=k,
        method="lctk",
        params={"weights": weights.w, "gammas": gammas},
    )


def _initial_wl_labels(graphs):
    labeled = [g.node_labels is not None for g in graphs]
    if any(labeled) and not all(labeled):
        raise ValueError("mixed labeled/unlabeled graphs in WL batch")
    if all(labeled) and graphs:
        return np.concatenate([g.node_labels for g in graphs])
    return np.zeros(sum(g.node_count for g in graphs), dtype=np.int64)


def _batch_csr(graphs):
    """Concatenate per-graph CSR adjacency into one global CSR."""
    sizes = np.array([g.node_count for g in graphs], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    indptr = [np.zeros(1, dtype=np.int32)]
    indices = []
    base = 0
    for g, off in zip(graphs, offsets[:-1]):
        indptr.append(g.indptr[1:].astype(np.int64) + base)
        indices.append(g.indices.astype(np.int64) + off)
        base += g.indices.size
    indptr = np.concatenate(indptr).astype(np.int32)
    indices = (np.concatenate(indices) if indices else np.empty(0)).astype(np.int32)
    return indptr, indices, offsets


def wl_feature_counts(graphs, h):
    """Per-iteration label-count matrices for the WL subtree feature map.

    Returns a list of (n_graphs x n_labels_t) sparse count matrices, one
    per iteration 0..h.  Iteration 0 counts the (compressed) initial
    labels; labels are compressed batch-wide in first-seen order.
    """
    if h < 0:
        raise ValueError("h must be non-negative")
    n_graphs = len(graphs)
    indptr, indices, offsets = _batch_csr(graphs)
    labels = _initial_wl_labels(graphs)
    # compress raw initial labels into consecutive ids, first-seen order
    table = {}
    init = np.empty(labels.size, dtype=np.int64)
    for i, lab in enumerate(labels.tolist()):
        nid = table.setdefault(lab, len(table))
        init[i] = nid
    labels = init
    n_labels = len(table)

    graph_of_node = np.repeat(np.arange(n_graphs), np.diff(offsets))
    counts = []
    for it in range(h + 1):
        if it > 0:
            labels, n_labels = backend.wl_relabel(labels, indptr, indices)
        data = np.ones(labels.size)
        mat = sp.csr_matrix(
            (data, (graph_of_node, labels)), shape=(n_graphs, max(n_labels, 1))
        )
        counts.append(mat)
    return counts


def wl_subtree_gram(graphs, h, normalize=False):
    """WL subtree kernel Gram: dot products of iteration-0..h label histograms.

    Raw counts by default; ``normalize=True`` rescales to unit self-similarity.
    """
    graphs = list(graphs)
    n = len(graphs)
    k = np.zeros((n, n))
    for mat in wl_feature_counts(graphs, h):
        k += (mat @ mat.T).toarray()
    k = 0.5 * (k + k.T)
    if normalize:
        d = np.sqrt(np.diagonal(k))
        d = np.where(d > 0.0, d, 1.0)
        k = k / np.outer(d, d)
        np.fill_diagonal(k, 1.0)
    return GramMatrix(values=k, method="wl", params={"h": int(h), "normalized": bool(normalize)})


def check_psd(gram, tol):
    """True iff the smallest eigenvalue is >= -tol.

    Raises if the matrix is farther than 1e-9 from symmetric (such input
    is a bug upstream, not a borderline kernel).
    """
    values = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)
    asym = float(np.max(np.abs(values - values.T))) if values.size else 0.0
    if asym > 1e-9:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    if values.size == 0:
        return True
    w = np.linalg.eigvalsh(0.5 * (values + values.T))
    return bool(w[0] >= -tol)


def write_gram_csv(path, gram, dataset_name="", build_seconds=None, meta_path=None):
    """Export: square CSV (no header) plus a JSON sidecar with provenance."""
    values = gram.values
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in values:
            fh.write(",".join(fmt17(x) for x in row) + "\n")
    meta = {
        "method": gram.method,
        "params": gram.params,
        "dataset": dataset_name,
        "size": int(values.shape[0]),
    }
    if build_seconds is not None:
        meta["build_seconds"] = float(build_seconds)
    meta_path = str(path) + ".meta.json" if meta_path is None else meta_path
    with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta_path
