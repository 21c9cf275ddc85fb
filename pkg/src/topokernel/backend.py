"""Backend selection: compiled accelerator vs pure-Python fallback.

The compiled ``_core`` extension is used when importable, unless the
environment variable ``TOPOKERNEL_BACKEND`` forces ``pure`` or
``compiled``.  Both backends expose the same four routines with identical
semantics; ``benchmarks/bench_backends.py`` compares their speed.
"""

import os

from . import _purecore

try:
    from . import _core
except ImportError:
    _core = None

SMO_CONVERGED = _purecore.SMO_CONVERGED
SMO_MAX_ITERATIONS = _purecore.SMO_MAX_ITERATIONS
SMO_STALLED = _purecore.SMO_STALLED

_BACKENDS = {"pure": _purecore}
if _core is not None:
    _BACKENDS["compiled"] = _core


def available_backends():
    return tuple(sorted(_BACKENDS))


def get_backend(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} not available (have: {', '.join(available_backends())})"
        ) from None


def _default_backend():
    forced = os.environ.get("TOPOKERNEL_BACKEND")
    if forced:
        return get_backend(forced)
    return _core if _core is not None else _purecore


_active = _default_backend()


def active_backend():
    """Name of the backend currently serving the hot kernels."""
    return _active.NAME


def use_backend(name):
    """Switch the active backend (mainly for tests and benchmarks)."""
    global _active
    _active = get_backend(name)


def bfs_distances(indptr, indices, source):
    return _active.bfs_distances(indptr, indices, source)


def total_distance_sum(indptr, indices):
    return _active.total_distance_sum(indptr, indices)


def wl_relabel(labels, indptr, indices):
    return _active.wl_relabel(labels, indptr, indices)


def smo_solve(K, y, C, tol, max_iterations, max_passes):
    return _active.smo_solve(K, y, C, tol, max_iterations, max_passes)
