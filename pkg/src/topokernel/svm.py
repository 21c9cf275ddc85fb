"""Binary soft-margin SVM over a precomputed kernel, trained by SMO.

The dual is solved in beta space (beta_i = y_i * alpha_i) by pairwise
coordinate ascent with second-order working-set selection.  Models store
the dual coefficients, the bias, and the training labels needed to score
kernel rows against the training set.
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from ._fmt import fmt17
from .errors import TrainingError
from .kernels import GramMatrix

#: Relative (to C) cutoff below which an alpha counts as zero.
ALPHA_THRESHOLD = 1e-8

_STATUS_NAMES = {
    backend.SMO_CONVERGED: "converged",
    backend.SMO_MAX_ITERATIONS: "max_iterations",
    backend.SMO_STALLED: "stalled",
}


@dataclass(frozen=True)
class SmoConfig:
    """Solver knobs; ``max_iterations=None`` means 1000 * n at train time."""

    tolerance: float = 1e-3
    max_passes: int = 10
    max_iterations: int | None = None

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class SvmModel:
    alpha: np.ndarray
    bias: float
    train_labels: np.ndarray
    support_indices: np.ndarray
    C: float
    metadata: dict = field(default_factory=dict)

    @property
    def n_train(self):
        return int(self.alpha.shape[0])


def _kernel_values(gram):
    values = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("kernel matrix must be square")
    return values


def train_smo(gram, labels, C, cfg=None):
    """Solve the soft-margin dual on a precomputed kernel.

    Labels must be -1/+1 with both classes present.  A non-PSD kernel is
    tolerated: observed negative curvature is recorded in the model
    metadata as ``psd_warning`` and training proceeds on the floored
    curvature.
    """
    if C <= 0.0:
        raise ValueError("C must be positive")
    cfg = SmoConfig() if cfg is None else cfg
    values = _kernel_values(gram)
    y = np.asarray(labels, dtype=np.float64).ravel()
    n = y.shape[0]
    if values.shape[0] != n:
        raise ValueError("kernel size does not match label count")
    if n < 2 or not np.all(np.abs(y) == 1.0):
        raise TrainingError("labels must be -1/+1, at least one of each")
    if np.all(y == y[0]):
        raise TrainingError("training requires both classes")

    max_iterations = cfg.max_iterations if cfg.max_iterations is not None else 1000 * n
    alpha, g, iterations, status, violation, neg_curvature = backend.smo_solve(
        values, y, float(C), cfg.tolerance, max_iterations, cfg.max_passes
    )

    threshold = ALPHA_THRESHOLD * C
    support = np.flatnonzero(alpha > threshold)
    free = (alpha > threshold) & (alpha < C - threshold)
    if np.any(free):
        bias = float(np.mean(g[free]))
    else:
        # midpoint of the feasible bias interval [m, M] over bound points
        beta = y * alpha
        lo = np.where(y > 0.0, 0.0, -C)
        hi = np.where(y > 0.0, C, 0.0)
        up = g[beta < hi]
        down = g[beta > lo]
        m = float(np.max(up)) if up.size else None
        big_m = float(np.min(down)) if down.size else None
        if m is not None and big_m is not None:
            bias = 0.5 * (m + big_m)
        elif m is not None:
            bias = m
        elif big_m is not None:
            bias = big_m
        else:
            bias = 0.0

    metadata = {
        "iterations": int(iterations),
        "status": _STATUS_NAMES[status],
        "kkt_violation": float(violation),
        "psd_warning": bool(neg_curvature),
    }
    return SvmModel(
        alpha=alpha,
        bias=bias,
        train_labels=y.copy(),
        support_indices=support.astype(np.int64),
        C=float(C),
        metadata=metadata,
    )


def dual_objective(model, gram, labels=None):
    """Dual value sum(alpha) - 0.5 * (alpha*y)' K (alpha*y)."""
    values = _kernel_values(gram)
    y = model.train_labels if labels is None else np.asarray(labels, dtype=np.float64).ravel()
    alpha = model.alpha
    if values.shape[0] != alpha.shape[0] or y.shape[0] != alpha.shape[0]:
        raise ValueError("inconsistent sizes")
    beta = alpha * y
    return float(np.sum(alpha) - 0.5 * beta @ values @ beta)


def decision_value(model, kernel_row):
    """Score one point given its kernel row against the training set."""
    row = np.asarray(kernel_row, dtype=np.float64).ravel()
    if row.shape[0] != model.n_train:
        raise ValueError(
            f"kernel row has {row.shape[0]} entries, expected {model.n_train}"
        )
    return float((model.alpha * model.train_labels) @ row + model.bias)


def decision_values(model, kernel_rows):
    """Scores for a batch; rows are K(test_i, train_j) in training order."""
    rows = np.atleast_2d(np.asarray(kernel_rows, dtype=np.float64))
    if rows.shape[1] != model.n_train:
        raise ValueError(
            f"kernel rows have {rows.shape[1]} columns, expected {model.n_train}"
        )
    return rows @ (model.alpha * model.train_labels) + model.bias


def predict(model, kernel_rows):
    """Predicted -1/+1 labels; a decision value of exactly 0 maps to +1."""
    return np.where(decision_values(model, kernel_rows) >= 0.0, 1, -1).astype(np.int64)


def save_model(path, model):
    """Text serialization; floats carry 17 significant digits."""
    lines = [
        "format = svm-model-1",
        f"n = {model.n_train}",
        f"c = {fmt17(model.C)}",
        f"bias = {fmt17(model.bias)}",
        "alpha = " + ",".join(fmt17(a) for a in model.alpha),
        "train_labels = " + ",".join(str(int(v)) for v in model.train_labels),
        "support_indices = " + ",".join(str(int(i)) for i in model.support_indices),
    ]
    for key in sorted(model.metadata):
        lines.append(f"meta.{key} = {model.metadata[key]}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_int_list(text, dtype):
    if text == "":
        return np.empty(0, dtype=dtype)
    return np.array([int(v) for v in text.split(",")], dtype=dtype)


def load_model(path):
    fields = {}
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            key, sep, value = line.partition(" = ")
            if not sep:
                raise ValueError(f"{path}:{line_no}: expected 'key = value'")
            fields[key] = value
    if fields.get("format") != "svm-model-1":
        raise ValueError(f"{path}: unrecognized model format")
    n = int(fields["n"])
    alpha_text = fields["alpha"]
    alpha = (
        np.array([float(v) for v in alpha_text.split(",")])
        if alpha_text
        else np.empty(0)
    )
    if alpha.shape[0] != n:
        raise ValueError(f"{path}: alpha length {alpha.shape[0]} != n {n}")
    metadata = {}
    for key, value in fields.items():
        if not key.startswith("meta."):
            continue
        name = key[len("meta."):]
        if value in ("True", "False"):
            metadata[name] = value == "True"
        else:
            try:
                metadata[name] = int(value)
            except ValueError:
                try:
                    metadata[name] = float(value)
                except ValueError:
                    metadata[name] = value
    return SvmModel(
        alpha=alpha,
        bias=float(fields["bias"]),
        train_labels=_parse_int_list(fields["train_labels"], np.float64),
        support_indices=_parse_int_list(fields["support_indices"], np.int64),
        C=float(fields["c"]),
        metadata=metadata,
    )
