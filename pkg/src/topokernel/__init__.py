"""Graph classification with topological-index kernels.

Fingerprints graphs with the Wiener, Estrada, and Randic indices, builds
RBF/EFV/LCTK and WL-subtree Gram matrices, and trains a precomputed-kernel
soft-margin SVM by sequential minimal optimization.  Hot loops run in a
compiled extension when available, with a pure-Python fallback.
"""

__version__ = "0.1.0"

from .backend import active_backend, available_backends, use_backend
from .errors import (
    DatasetError,
    DatasetFormatError,
    StratificationError,
    TopoKernelError,
    TrainingError,
    UnsupportedDatasetError,
)
from .evaluation import (
    CvResult,
    FoldPlan,
    GridConfig,
    MethodSpec,
    TimingReport,
    accuracy,
    cross_validate,
    default_grid,
    f1,
    grid_search,
    holdout_evaluate,
    scaling_experiment,
    stratified_kfold,
    time_gram,
)
from .graphs import Dataset, Graph, bfs_distances, connected_components, erdos_renyi, load_tu_dataset
from .indices import (
    CANONICAL_SCHEMA,
    ESTRADA,
    RANDIC,
    WIENER,
    FeatureVector,
    batch_fingerprints,
    estrada_index,
    fingerprint,
    randic_index,
    wiener_index,
)
from .kernels import (
    DEFAULT_WEIGHT_VECTORS,
    GramMatrix,
    LctkWeights,
    StandardizationStats,
    check_psd,
    fit_standardizer,
    gram_efv,
    gram_lctk,
    gram_single,
    rbf,
    wl_subtree_gram,
)
from .svm import (
    SmoConfig,
    SvmModel,
    decision_value,
    dual_objective,
    load_model,
    predict,
    save_model,
    train_smo,
)

__all__ = [
    "__version__",
    "active_backend",
    "available_backends",
    "use_backend",
    "TopoKernelError",
    "DatasetError",
    "DatasetFormatError",
    "UnsupportedDatasetError",
    "StratificationError",
    "TrainingError",
    "Graph",
    "Dataset",
    "bfs_distances",
    "connected_components",
    "erdos_renyi",
    "load_tu_dataset",
    "WIENER",
    "ESTRADA",
    "RANDIC",
    "CANONICAL_SCHEMA",
    "FeatureVector",
    "fingerprint",
    "batch_fingerprints",
    "wiener_index",
    "estrada_index",
    "randic_index",
    "GramMatrix",
    "StandardizationStats",
    "LctkWeights",
    "DEFAULT_WEIGHT_VECTORS",
    "rbf",
    "fit_standardizer",
    "gram_single",
    "gram_efv",
    "gram_lctk",
    "wl_subtree_gram",
    "check_psd",
    "SmoConfig",
    "SvmModel",
    "train_smo",
    "dual_objective",
    "decision_value",
    "predict",
    "save_model",
    "load_model",
    "MethodSpec",
    "FoldPlan",
    "GridConfig",
    "CvResult",
    "TimingReport",
    "stratified_kfold",
    "accuracy",
    "f1",
    "cross_validate",
    "holdout_evaluate",
    "grid_search",
    "default_grid",
    "time_gram",
    "scaling_experiment",
]
