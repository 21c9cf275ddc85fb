"""Stratified cross-validation, grid search, metrics, and timing runs.

The evaluation engine shares one fold plan across many (method, C, gamma)
cells and caches per-fold kernel components, so a full grid search costs
little more than its distinct gamma values.  All randomness flows from
explicit integer seeds through ``numpy.random.default_rng``.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._fmt import fmt17
from .errors import StratificationError, TrainingError
from .graphs import erdos_renyi
from .indices import (
    CANONICAL_SCHEMA,
    batch_fingerprints,
    estrada_index,
    randic_index,
    wiener_index,
)
from .kernels import (
    DEFAULT_WEIGHT_VECTORS,
    LctkWeights,
    fit_standardizer,
    squared_distances,
    wl_feature_counts,
    wl_subtree_gram,
)
from .svm import SmoConfig, predict, train_smo

WL_DEFAULT_H = 7


@dataclass(frozen=True)
class MethodSpec:
    """Which kernel to evaluate: one index, EFV, LCTK, or the WL baseline."""

    kind: str
    index: str | None = None
    weights: tuple | None = None
    h: int | None = None

    def __post_init__(self):
        if self.kind not in ("single", "efv", "lctk", "wl"):
            raise ValueError(f"unknown method kind {self.kind!r}")
        if self.kind == "single" and self.index not in CANONICAL_SCHEMA:
            raise ValueError(f"unknown index {self.index!r}")
        if self.kind == "lctk" and self.weights is not None:
            object.__setattr__(self, "weights", LctkWeights(self.weights).w)
        if self.kind == "wl":
            h = WL_DEFAULT_H if self.h is None else int(self.h)
            if h < 0:
                raise ValueError("h must be non-negative")
            object.__setattr__(self, "h", h)

    @classmethod
    def single(cls, index):
        return cls(kind="single", index=index)

    @classmethod
    def efv(cls):
        return cls(kind="efv")

    @classmethod
    def lctk(cls, weights=None):
        """weights=None leaves the weight axis to the grid search."""
        return cls(kind="lctk", weights=weights)

    @classmethod
    def wl(cls, h=WL_DEFAULT_H):
        return cls(kind="wl", h=h)

    @property
    def name(self):
        if self.kind == "single":
            return f"single_{self.index}"
        return self.kind

    @property
    def uses_gamma(self):
        return self.kind != "wl"


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int

    def fold_indices(self, fold):
        train = np.flatnonzero(self.assignments != fold)
        test = np.flatnonzero(self.assignments == fold)
        return train, test


def stratified_kfold(labels, k, seed):
    """Assign samples to k folds, balanced globally and within each class.

    Per class, the remainder after even division goes to folds in a
    round-robin that continues across classes, so total fold sizes also
    differ by at most one.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    assignments = np.full(labels.shape[0], -1, dtype=np.int64)
    offset = 0
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise StratificationError(
                f"class {cls} has {members.size} members, fewer than k={k}"
            )
        members = rng.permutation(members)
        base, extra = divmod(members.size, k)
        sizes = np.full(k, base, dtype=np.int64)
        for i in range(extra):
            sizes[(offset + i) % k] += 1
        offset = (offset + extra) % k
        stop = np.cumsum(sizes)
        for f in range(k):
            assignments[members[stop[f] - sizes[f]:stop[f]]] = f
    return FoldPlan(k=int(k), assignments=assignments, seed=int(seed))


def stratified_holdout(labels, train_fraction, seed):
    """Single stratified train/test split; returns (train_idx, test_idx)."""
    labels = np.asarray(labels)
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_parts = []
    test_parts = []
    for cls in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == cls))
        if members.size < 2:
            raise StratificationError(
                f"class {cls} has {members.size} members, need at least 2 to split"
            )
        n_train = int(round(train_fraction * members.size))
        n_train = min(max(n_train, 1), members.size - 1)
        train_parts.append(members[:n_train])
        test_parts.append(members[n_train:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return train, test


def accuracy(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape[0] != truth.shape[0] or pred.shape[0] == 0:
        raise ValueError("prediction and truth must have equal, nonzero length")
    return float(np.mean(pred == truth))


def f1(pred, truth):
    """F1 with +1 as the positive class; 0 when precision + recall is 0."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape[0] != truth.shape[0] or pred.shape[0] == 0:
        raise ValueError("prediction and truth must have equal, nonzero length")
    tp = int(np.sum((pred == 1) & (truth == 1)))
    fp = int(np.sum((pred == 1) & (truth != 1)))
    fn = int(np.sum((pred != 1) & (truth == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return float(2.0 * precision * recall / (precision + recall))


@dataclass(frozen=True)
class GridConfig:
    weight_vectors: tuple
    c_grid: tuple
    gamma_grid: tuple

    def __post_init__(self):
        weights = tuple(LctkWeights(w).w for w in self.weight_vectors)
        c_grid = tuple(float(c) for c in self.c_grid)
        gamma_grid = tuple(float(g) for g in self.gamma_grid)
        if not weights or not c_grid or not gamma_grid:
            raise ValueError("grid axes must be non-empty")
        if any(c <= 0.0 for c in c_grid) or any(g <= 0.0 for g in gamma_grid):
            raise ValueError("C and gamma grid values must be positive")
        object.__setattr__(self, "weight_vectors", weights)
        object.__setattr__(self, "c_grid", c_grid)
        object.__setattr__(self, "gamma_grid", gamma_grid)

    @property
    def lctk_cell_count(self):
        return len(self.weight_vectors) * len(self.c_grid) * len(self.gamma_grid)


def default_grid():
    """Seven weight vectors and decade steps 1e-4..1e4 for C and gamma."""
    decades = tuple(float(f"1e{e}") for e in range(-4, 5))
    return GridConfig(
        weight_vectors=DEFAULT_WEIGHT_VECTORS, c_grid=decades, gamma_grid=decades
    )


@dataclass(frozen=True)
class CvResult:
    mean_accuracy: float
    std_accuracy: float
    mean_f1: float
    std_f1: float
    per_fold: tuple
    config: dict = field(repr=False)


def _cell_config(dataset_name, method, c, gamma, protocol):
    return {
        "dataset": dataset_name,
        "method": method.name,
        "weights": method.weights if method.kind == "lctk" else None,
        "C": float(c),
        "gamma": None if gamma is None else float(gamma),
        "h": method.h if method.kind == "wl" else None,
        **protocol,
    }


def _evaluate_fold(cells, labels, train_idx, test_idx, fingerprints, wl_grams, smo_cfg, fold):
    """Metrics array of shape (n_cells, 2) for one train/test split."""
    y_train = labels[train_idx].astype(np.float64)
    y_test = labels[test_idx]

    sq_train = {}
    sq_cross = {}
    if fingerprints is not None:
        for j in range(len(CANONICAL_SCHEMA)):
            stats = fit_standardizer(fingerprints[train_idx, j:j + 1])
            col_train = stats.apply(fingerprints[train_idx, j:j + 1])
            col_test = stats.apply(fingerprints[test_idx, j:j + 1])
            sq_train[j] = squared_distances(col_train)
            sq_cross[j] = squared_distances(col_test, col_train)
        sq_train["efv"] = sum(sq_train[j] for j in range(len(CANONICAL_SCHEMA)))
        sq_cross["efv"] = sum(sq_cross[j] for j in range(len(CANONICAL_SCHEMA)))

    def component(j, gamma):
        # single-index kernels; diagonals are exp(-gamma*0) = 1 exactly
        return np.exp(-gamma * sq_train[j]), np.exp(-gamma * sq_cross[j])

    def kernel_pair(method, gamma):
        if method.kind == "wl":
            g = wl_grams[method.h]
            return g[np.ix_(train_idx, train_idx)], g[np.ix_(test_idx, train_idx)]
        if method.kind == "single":
            return component(CANONICAL_SCHEMA.index(method.index), gamma)
        if method.kind == "efv":
            return component("efv", gamma)
        k_train = np.zeros_like(sq_train[0])
        k_test = np.zeros_like(sq_cross[0])
        for w, j in zip(method.weights, range(len(CANONICAL_SCHEMA))):
            base_train, base_test = component(j, gamma)
            k_train += w * base_train
            k_test += w * base_test
        np.fill_diagonal(k_train, 1.0)
        return k_train, k_test

    # cells sharing (method, gamma) reuse one kernel across their C values
    groups = {}
    for ci, (method, c, gamma) in enumerate(cells):
        groups.setdefault((method, gamma), []).append((ci, c))

    out = np.zeros((len(cells), 2))
    for (method, gamma), members in groups.items():
        k_train, k_test = kernel_pair(method, gamma)
        for ci, c in members:
            try:
                model = train_smo(k_train, y_train, c, smo_cfg)
            except TrainingError as exc:
                raise TrainingError(
                    f"fold {fold}: method {method.name}, C={c!r}, "
                    f"gamma={gamma!r}: {exc}"
                ) from exc
            pred = predict(model, k_test)
            out[ci, 0] = accuracy(pred, y_test)
            out[ci, 1] = f1(pred, y_test)
    return out


def _evaluate_cells(dataset, cells, splits, smo_cfg=None, jobs=1):
    """Per-split metrics for every cell: array (n_cells, n_splits, 2)."""
    smo_cfg = SmoConfig() if smo_cfg is None else smo_cfg
    labels = dataset.class_labels
    needs_fp = any(m.kind != "wl" for m, _, _ in cells)
    fingerprints = batch_fingerprints(dataset, jobs=jobs) if needs_fp else None
    wl_hs = sorted({m.h for m, _, _ in cells if m.kind == "wl"})
    wl_grams = {h: wl_subtree_gram(dataset.graphs, h).values for h in wl_hs}

    metrics = np.zeros((len(cells), len(splits), 2))
    if jobs > 1 and len(splits) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    _evaluate_fold,
                    cells, labels, tr, te, fingerprints, wl_grams, smo_cfg, f,
                )
                for f, (tr, te) in enumerate(splits)
            ]
            for f, fut in enumerate(futures):
                metrics[:, f, :] = fut.result()
    else:
        for f, (tr, te) in enumerate(splits):
            metrics[:, f, :] = _evaluate_fold(
                cells, labels, tr, te, fingerprints, wl_grams, smo_cfg, f
            )
    return metrics


def _aggregate(dataset, cells, metrics, protocol):
    results = []
    for ci, (method, c, gamma) in enumerate(cells):
        acc = metrics[ci, :, 0]
        f1s = metrics[ci, :, 1]
        results.append(
            CvResult(
                mean_accuracy=float(acc.mean()),
                std_accuracy=float(acc.std()),
                mean_f1=float(f1s.mean()),
                std_f1=float(f1s.std()),
                per_fold=tuple((float(a), float(b)) for a, b in metrics[ci]),
                config=_cell_config(dataset.name, method, c, gamma, protocol),
            )
        )
    return results


def _check_cell(method, gamma):
    if method.uses_gamma:
        if gamma is None or gamma <= 0.0:
            raise ValueError(f"method {method.name} needs a positive gamma")
        return float(gamma)
    return None


def cross_validate(dataset, method, c, gamma=None, k=10, seed=0, smo_cfg=None, jobs=1):
    """Stratified k-fold evaluation of one (method, C, gamma) cell.

    Each fold standardizes on its training rows only, builds the train
    Gram and test-to-train kernel rows, trains the SMO SVM, and scores
    the held-out fold.
    """
    if c <= 0.0:
        raise ValueError("C must be positive")
    if method.kind == "lctk" and method.weights is None:
        raise ValueError("LCTK cross-validation needs explicit weights")
    gamma = _check_cell(method, gamma)
    plan = stratified_kfold(dataset.class_labels, k, seed)
    splits = [plan.fold_indices(f) for f in range(plan.k)]
    cells = [(method, float(c), gamma)]
    metrics = _evaluate_cells(dataset, cells, splits, smo_cfg, jobs)
    protocol = {"protocol": "cv", "k": int(k), "seed": int(seed)}
    return _aggregate(dataset, cells, metrics, protocol)[0]


def holdout_evaluate(
    dataset, method, c, gamma=None, train_fraction=0.8, seed=0, smo_cfg=None
):
    """Single stratified split evaluation (the optional 80/20 protocol)."""
    if c <= 0.0:
        raise ValueError("C must be positive")
    if method.kind == "lctk" and method.weights is None:
        raise ValueError("LCTK evaluation needs explicit weights")
    gamma = _check_cell(method, gamma)
    split = stratified_holdout(dataset.class_labels, train_fraction, seed)
    cells = [(method, float(c), gamma)]
    metrics = _evaluate_cells(dataset, cells, [split], smo_cfg)
    protocol = {
        "protocol": "holdout",
        "train_fraction": float(train_fraction),
        "seed": int(seed),
    }
    return _aggregate(dataset, cells, metrics, protocol)[0]


def grid_cells(method, grid):
    """Enumerate grid cells: weights outer, C middle, gamma inner."""
    cells = []
    if method.kind == "lctk":
        for w in grid.weight_vectors:
            spec = MethodSpec.lctk(w)
            for c in grid.c_grid:
                for gamma in grid.gamma_grid:
                    cells.append((spec, c, gamma))
    elif method.kind == "wl":
        for c in grid.c_grid:
            cells.append((method, c, None))
    else:
        for c in grid.c_grid:
            for gamma in grid.gamma_grid:
                cells.append((method, c, gamma))
    return cells


def grid_search(dataset, method, grid=None, k=10, seed=0, smo_cfg=None, jobs=1):
    """Evaluate every grid cell; returns (best CvResult, all CvResults).

    Best = highest mean accuracy; ties break to higher mean F1, then to
    the earlier cell in enumeration order.
    """
    grid = default_grid() if grid is None else grid
    cells = grid_cells(method, grid)
    plan = stratified_kfold(dataset.class_labels, k, seed)
    splits = [plan.fold_indices(f) for f in range(plan.k)]
    metrics = _evaluate_cells(dataset, cells, splits, smo_cfg, jobs)
    protocol = {"protocol": "cv", "k": int(k), "seed": int(seed)}
    results = _aggregate(dataset, cells, metrics, protocol)
    best = results[0]
    for r in results[1:]:
        if (r.mean_accuracy, r.mean_f1) > (best.mean_accuracy, best.mean_f1):
            best = r
    return best, results


@dataclass(frozen=True)
class TimingReport:
    method: str
    dataset: str
    repetitions: int
    mean_seconds: float
    std_seconds: float
    samples: tuple = ()


def _build_timed_gram(method, dataset, gamma):
    if method.kind == "wl":
        return wl_subtree_gram(dataset.graphs, method.h)
    if method.kind == "single":
        features = batch_fingerprints(dataset, (method.index,))
    else:
        features = batch_fingerprints(dataset, CANONICAL_SCHEMA)
    if method.kind == "lctk":
        weights = method.weights
        if weights is None:
            weights = DEFAULT_WEIGHT_VECTORS[0]
        k = None
        for j, w in enumerate(weights):
            col = features[:, j:j + 1]
            std = fit_standardizer(col).apply(col)
            part = w * np.exp(-gamma * squared_distances(std))
            k = part if k is None else k + part
        np.fill_diagonal(k, 1.0)
        return k
    std = fit_standardizer(features).apply(features)
    k = np.exp(-gamma * squared_distances(std))
    np.fill_diagonal(k, 1.0)
    return k


def time_gram(method, dataset, repetitions=20, gamma=1.0):
    """Wall-clock the full Gram build (fingerprints or WL rounds included).

    Dataset loading is outside the timer; with one repetition the std is
    reported as 0.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter()
        _build_timed_gram(method, dataset, gamma)
        samples.append(time.perf_counter() - start)
    samples = tuple(samples)
    mean = float(np.mean(samples))
    std = float(np.std(samples, ddof=1)) if repetitions > 1 else 0.0
    return TimingReport(
        method=method.name,
        dataset=dataset.name,
        repetitions=int(repetitions),
        mean_seconds=mean,
        std_seconds=std,
        samples=samples,
    )


@dataclass(frozen=True)
class ScalingRow:
    n: int
    p: float
    method: str
    seconds: float
    seed: int


_SCALING_FUNCS = {
    "wiener": wiener_index,
    "estrada": estrada_index,
    "randic": randic_index,
}


def scaling_experiment(p, sizes, methods, seed, h=WL_DEFAULT_H):
    """Per-graph feature timing on ER graphs of growing size.

    One graph is generated per size (seed + size index) and shared by all
    methods; each timing is a single run after one warmup.
    """
    sizes = [int(n) for n in sizes]
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly ascending")
    methods = list(methods)
    for m in methods:
        if m not in _SCALING_FUNCS and m != "wl":
            raise ValueError(f"unknown scaling method {m!r}")
    rows = []
    for i, n in enumerate(sizes):
        g = erdos_renyi(n, p, seed + i)
        for m in methods:
            if m == "wl":
                run = lambda: wl_feature_counts([g], h)
            else:
                run = lambda: _SCALING_FUNCS[m](g)
            run()  # warmup
            start = time.perf_counter()
            run()
            rows.append(
                ScalingRow(
                    n=n,
                    p=float(p),
                    method=m,
                    seconds=time.perf_counter() - start,
                    seed=int(seed),
                )
            )
    return rows


def format_weights(weights):
    if weights is None:
        return ""
    return ";".join(fmt17(w) for w in weights)


def write_results_csv(path, results):
    """Rows: dataset,method,weights,C,gamma,mean_acc,std_acc,mean_f1,std_f1,seed."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("dataset,method,weights,C,gamma,mean_acc,std_acc,mean_f1,std_f1,seed\n")
        for r in results:
            cfg = r.config
            gamma = "" if cfg["gamma"] is None else fmt17(cfg["gamma"])
            fh.write(
                ",".join(
                    [
                        cfg["dataset"],
                        cfg["method"],
                        format_weights(cfg["weights"]),
                        fmt17(cfg["C"]),
                        gamma,
                        fmt17(r.mean_accuracy),
                        fmt17(r.std_accuracy),
                        fmt17(r.mean_f1),
                        fmt17(r.std_f1),
                        str(cfg["seed"]),
                    ]
                )
                + "\n"
            )


def write_timing_csv(path, reports):
    """Rows: dataset,method,reps,mean_s,std_s."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("dataset,method,reps,mean_s,std_s\n")
        for r in reports:
            fh.write(
                f"{r.dataset},{r.method},{r.repetitions},"
                f"{fmt17(r.mean_seconds)},{fmt17(r.std_seconds)}\n"
            )


def write_scaling_csv(path, rows):
    """Rows: n,p,method,seconds,seed."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("n,p,method,seconds,seed\n")
        for r in rows:
            fh.write(
                f"{r.n},{fmt17(r.p)},{r.method},{fmt17(r.seconds)},{r.seed}\n"
            )
