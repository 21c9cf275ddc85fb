"""Command-line interface: fingerprints, Grams, evaluation, and timings.

Every command writes its data file(s) plus a ``<out>.manifest.txt``
key-value sidecar recording the command line, seeds, parameters, tool
version, and timestamps.  With a fixed seed the data outputs are
bit-reproducible; only manifest timestamps change between reruns.
"""

import argparse
import os
import sys
import time
from datetime import datetime, timezone

from . import __version__
from ._fmt import fmt17, write_key_values
from .errors import TopoKernelError
from .evaluation import (
    GridConfig,
    MethodSpec,
    cross_validate,
    default_grid,
    format_weights,
    grid_search,
    holdout_evaluate,
    scaling_experiment,
    time_gram,
    write_results_csv,
    write_scaling_csv,
    write_timing_csv,
)
from .graphs import load_tu_dataset
from .indices import CANONICAL_SCHEMA, batch_fingerprints, write_fingerprint_csv
from .kernels import (
    LctkWeights,
    fit_standardizer,
    gram_efv,
    gram_lctk,
    gram_single,
    wl_subtree_gram,
    write_gram_csv,
)

_METHOD_CHOICES = (
    "single_wiener",
    "single_estrada",
    "single_randic",
    "efv",
    "lctk",
    "wl",
)


class _UsageError(Exception):
    """Bad flag values discovered after argparse; exits with status 2."""


def _dataset_dir(args):
    base = args.dataset_dir or os.environ.get("TOPOKERNEL_DATA_DIR") or "data"
    return os.path.join(base, args.dataset)


def _load(args):
    directory = _dataset_dir(args)
    return load_tu_dataset(directory, args.dataset), directory


def _parse_weights(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError("--weights takes exactly three comma-separated values")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise _UsageError(f"--weights values must be numbers, got {text!r}") from None
    try:
        return LctkWeights(values).w
    except ValueError as exc:
        raise _UsageError(f"--weights: {exc}") from None


def _parse_method(args):
    name = args.method
    if name not in _METHOD_CHOICES:
        raise _UsageError(
            f"unknown method {name!r} (choose from {', '.join(_METHOD_CHOICES)})"
        )
    if name.startswith("single_"):
        return MethodSpec.single(name[len("single_"):])
    if name == "efv":
        return MethodSpec.efv()
    if name == "wl":
        return MethodSpec.wl(args.h)
    weights = _parse_weights(args.weights) if getattr(args, "weights", None) else None
    return MethodSpec.lctk(weights)


def _require_gamma(args):
    if args.gamma is None:
        raise _UsageError("this method needs --gamma")
    if args.gamma <= 0.0:
        raise _UsageError("--gamma must be positive")
    return args.gamma


def _timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_manifest(out_path, args, started, extra=()):
    items = [
        ("command", " ".join(["topokernel"] + (sys.argv[1:] if args.argv is None else args.argv))),
        ("version", __version__),
        ("started", started),
        ("finished", _timestamp()),
        ("output", str(out_path)),
    ]
    items.extend(extra)
    write_key_values(f"{out_path}.manifest.txt", items)


def cmd_fingerprint(args):
    started = _timestamp()
    schema = tuple(args.schema.split(",")) if args.schema else CANONICAL_SCHEMA
    for name in schema:
        if name not in CANONICAL_SCHEMA:
            raise _UsageError(f"unknown index {name!r} in schema")
    dataset, directory = _load(args)
    matrix = write_fingerprint_csv(args.out, dataset, schema, jobs=args.jobs)
    _write_manifest(
        args.out,
        args,
        started,
        [
            ("dataset", dataset.name),
            ("dataset_dir", directory),
            ("schema", ",".join(schema)),
            ("rows", matrix.shape[0]),
        ],
    )
    print(f"wrote {matrix.shape[0]} fingerprints to {args.out}")
    return 0


def _build_export_gram(args, dataset):
    method = _parse_method(args)
    if method.kind == "wl":
        return method, wl_subtree_gram(dataset.graphs, method.h)
    gamma = _require_gamma(args)
    if method.kind == "single":
        col = batch_fingerprints(dataset, (method.index,), jobs=args.jobs)
        std = fit_standardizer(col).apply(col)
        return method, gram_single(std, gamma, index=method.name)
    features = batch_fingerprints(dataset, CANONICAL_SCHEMA, jobs=args.jobs)
    if method.kind == "efv":
        std = fit_standardizer(features).apply(features)
        return method, gram_efv(std, gamma)
    if method.weights is None:
        raise _UsageError("LCTK needs --weights w1,w2,w3")
    cols = []
    for j in range(features.shape[1]):
        col = features[:, j:j + 1]
        cols.append(fit_standardizer(col).apply(col))
    return method, gram_lctk(cols, method.weights, (gamma, gamma, gamma))


def cmd_gram(args):
    started = _timestamp()
    dataset, directory = _load(args)
    t0 = time.perf_counter()
    method, gram = _build_export_gram(args, dataset)
    build_seconds = time.perf_counter() - t0
    write_gram_csv(args.out, gram, dataset_name=dataset.name, build_seconds=build_seconds)
    extra = [
        ("dataset", dataset.name),
        ("dataset_dir", directory),
        ("method", method.name),
    ]
    for key, value in sorted(gram.params.items()):
        if key == "weights":
            value = format_weights(value)
        extra.append((key, value))
    _write_manifest(args.out, args, started, extra)
    print(f"wrote {gram.size}x{gram.size} {method.name} Gram to {args.out}")
    return 0


def _method_extra(args, method, result):
    cfg = result.config
    extra = [
        ("dataset", cfg["dataset"]),
        ("method", cfg["method"]),
        ("seed", cfg["seed"]),
        ("C", fmt17(cfg["C"])),
    ]
    if cfg["gamma"] is not None:
        extra.append(("gamma", fmt17(cfg["gamma"])))
    if cfg["weights"] is not None:
        extra.append(("weights", format_weights(cfg["weights"])))
    if cfg["h"] is not None:
        extra.append(("h", cfg["h"]))
    if cfg["protocol"] == "cv":
        extra.append(("k", cfg["k"]))
    else:
        extra.append(("train_fraction", fmt17(cfg["train_fraction"])))
    return extra


def cmd_evaluate(args):
    started = _timestamp()
    dataset, directory = _load(args)
    method = _parse_method(args)
    if method.kind == "lctk" and method.weights is None:
        raise _UsageError("evaluate with lctk needs --weights w1,w2,w3")
    gamma = _require_gamma(args) if method.uses_gamma else None
    if args.c <= 0.0:
        raise _UsageError("--c must be positive")
    if args.holdout is not None:
        if not 0.0 < args.holdout < 1.0:
            raise _UsageError("--holdout fraction must be in (0, 1)")
        result = holdout_evaluate(
            dataset, method, args.c, gamma,
            train_fraction=args.holdout, seed=args.seed,
        )
    else:
        result = cross_validate(
            dataset, method, args.c, gamma, k=args.k, seed=args.seed, jobs=args.jobs
        )
    write_results_csv(args.out, [result])
    extra = _method_extra(args, method, result) + [("dataset_dir", directory)]
    _write_manifest(args.out, args, started, extra)
    print(
        f"{dataset.name} {method.name}: accuracy "
        f"{result.mean_accuracy:.4f} +/- {result.std_accuracy:.4f}, "
        f"F1 {result.mean_f1:.4f} +/- {result.std_f1:.4f}"
    )
    return 0


def _parse_grid_file(path):
    """Text grid: ``c = ...``, ``gamma = ...``, repeatable ``weights = ...``."""
    c_grid = None
    gamma_grid = None
    weights = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read grid file: {exc}") from None
    with fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise _UsageError(f"{path}:{line_no}: expected 'key = values'")
            key = key.strip()
            value = value.strip()
            try:
                numbers = tuple(float(v) for v in value.replace(",", " ").split())
            except ValueError:
                raise _UsageError(
                    f"{path}:{line_no}: values must be numbers, got {value!r}"
                ) from None
            if key == "c":
                c_grid = numbers
            elif key == "gamma":
                gamma_grid = numbers
            elif key == "weights":
                if len(numbers) != 3:
                    raise _UsageError(
                        f"{path}:{line_no}: weights lines take exactly 3 values"
                    )
                try:
                    weights.append(LctkWeights(numbers).w)
                except ValueError as exc:
                    raise _UsageError(f"{path}:{line_no}: {exc}") from None
            else:
                raise _UsageError(
                    f"{path}:{line_no}: unknown key {key!r} (use c, gamma, weights)"
                )
    base = default_grid()
    try:
        return GridConfig(
            weight_vectors=tuple(weights) or base.weight_vectors,
            c_grid=c_grid or base.c_grid,
            gamma_grid=gamma_grid or base.gamma_grid,
        )
    except ValueError as exc:
        raise _UsageError(f"{path}: {exc}") from None


def cmd_gridsearch(args):
    started = _timestamp()
    dataset, directory = _load(args)
    method = _parse_method(args)
    grid = _parse_grid_file(args.grid_file) if args.grid_file else default_grid()
    best, results = grid_search(
        dataset, method, grid, k=args.k, seed=args.seed, jobs=args.jobs
    )
    write_results_csv(args.out, results)
    cfg = best.config
    extra = [
        ("dataset", dataset.name),
        ("dataset_dir", directory),
        ("method", method.name),
        ("seed", args.seed),
        ("k", args.k),
        ("cells", len(results)),
        ("best_C", fmt17(cfg["C"])),
        ("best_gamma", "" if cfg["gamma"] is None else fmt17(cfg["gamma"])),
        ("best_weights", format_weights(cfg["weights"])),
        ("best_mean_acc", fmt17(best.mean_accuracy)),
        ("best_mean_f1", fmt17(best.mean_f1)),
    ]
    _write_manifest(args.out, args, started, extra)
    weights_note = f" weights={format_weights(cfg['weights'])}" if cfg["weights"] else ""
    gamma_note = f" gamma={cfg['gamma']:g}" if cfg["gamma"] is not None else ""
    print(
        f"{dataset.name} {cfg['method']}: best accuracy "
        f"{best.mean_accuracy:.4f} +/- {best.std_accuracy:.4f} "
        f"(F1 {best.mean_f1:.4f}) at C={cfg['C']:g}{gamma_note}{weights_note} "
        f"over {len(results)} cells"
    )
    return 0


def cmd_bench(args):
    started = _timestamp()
    dataset, directory = _load(args)
    if args.reps < 1:
        raise _UsageError("--reps must be at least 1")
    reports = []
    for name in args.methods.split(","):
        margs = argparse.Namespace(method=name.strip(), h=args.h, weights=None)
        method = _parse_method(margs)
        reports.append(time_gram(method, dataset, repetitions=args.reps, gamma=args.gamma))
    write_timing_csv(args.out, reports)
    _write_manifest(
        args.out,
        args,
        started,
        [
            ("dataset", dataset.name),
            ("dataset_dir", directory),
            ("methods", args.methods),
            ("reps", args.reps),
            ("gamma", fmt17(args.gamma)),
            ("h", args.h),
        ],
    )
    for r in reports:
        print(f"{r.dataset} {r.method}: {r.mean_seconds:.6f}s +/- {r.std_seconds:.6f}s")
    return 0


def cmd_scaling(args):
    started = _timestamp()
    if not 0.0 <= args.p <= 1.0:
        raise _UsageError("--p must be in [0, 1]")
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        raise _UsageError(f"--sizes must be integers, got {args.sizes!r}") from None
    methods = [m.strip() for m in args.methods.split(",")]
    try:
        rows = scaling_experiment(args.p, sizes, methods, args.seed, h=args.h)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    write_scaling_csv(args.out, rows)
    _write_manifest(
        args.out,
        args,
        started,
        [
            ("p", fmt17(args.p)),
            ("sizes", args.sizes),
            ("methods", args.methods),
            ("seed", args.seed),
            ("h", args.h),
        ],
    )
    print(f"wrote {len(rows)} scaling rows to {args.out}")
    return 0


def _add_dataset_flags(sub):
    sub.add_argument(
        "--dataset-dir",
        default=None,
        help="directory holding <name>/<name>_*.txt (default: $TOPOKERNEL_DATA_DIR or ./data)",
    )
    sub.add_argument("--dataset", required=True, help="dataset name, e.g. MUTAG")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="topokernel",
        description="Graph classification with topological-index kernels",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fingerprint", help="write the fingerprint CSV for a dataset")
    _add_dataset_flags(p)
    p.add_argument("--schema", default=None, help="comma list of indices (default all three)")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fingerprint)

    p = subs.add_parser("gram", help="write a Gram matrix CSV plus metadata sidecar")
    _add_dataset_flags(p)
    p.add_argument("--method", required=True, help="|".join(_METHOD_CHOICES))
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--weights", default=None, help="w1,w2,w3 for lctk")
    p.add_argument("--h", type=int, default=7, help="WL iterations")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_gram)

    p = subs.add_parser("evaluate", help="cross-validate one configuration")
    _add_dataset_flags(p)
    p.add_argument("--method", required=True, help="|".join(_METHOD_CHOICES))
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--weights", default=None, help="w1,w2,w3 for lctk")
    p.add_argument("--h", type=int, default=7, help="WL iterations")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--holdout",
        type=float,
        default=None,
        help="use one stratified split with this train fraction instead of k-fold",
    )
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("gridsearch", help="exhaustive grid search with k-fold CV")
    _add_dataset_flags(p)
    p.add_argument("--method", default="lctk", help="|".join(_METHOD_CHOICES))
    p.add_argument("--grid-file", default=None, help="text file with c/gamma/weights lines")
    p.add_argument("--h", type=int, default=7, help="WL iterations")
    p.add_argument("--weights", default=None, help=argparse.SUPPRESS)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_gridsearch)

    p = subs.add_parser("bench", help="time full Gram construction per method")
    _add_dataset_flags(p)
    p.add_argument("--methods", required=True, help="comma list, e.g. single_randic,wl")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--h", type=int, default=7, help="WL iterations")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = subs.add_parser("scaling", help="per-graph feature timings on ER graphs")
    p.add_argument("--p", type=float, required=True, help="edge probability")
    p.add_argument("--sizes", required=True, help="comma list of node counts, ascending")
    p.add_argument("--methods", default="wiener,estrada,randic,wl")
    p.add_argument("--h", type=int, default=7, help="WL iterations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scaling)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = list(argv) if argv is not None else None
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TopoKernelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
