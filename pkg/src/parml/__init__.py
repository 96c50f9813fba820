"""parml: a data-parallel machine-learning toolkit.

Partitioned schema-carrying tables (mltable), partition-local dense/CSR
linear algebra (localmatrix), a deterministic multi-worker execution engine
with gather-average and broadcast (engine), SGD/ALS/k-means training with
text featurization (learn), and a CLI harness for desk-scale weak and
strong scaling experiments (cli).
"""

from .errors import (
    CastError,
    ConfigError,
    DegenerateError,
    DimError,
    DivergenceError,
    EmptyTableError,
    ParmlError,
    SchemaError,
    SingularMatrixError,
    UnsupportedError,
    UserFunctionError,
)
from .mltable import EMPTY, MLNumericTable, MLRow, MLTable, Schema, ValueKind
from .localmatrix import LocalMatrix, SvdResult
from .engine import (
    Broadcast,
    PartitionTask,
    WorkerPool,
    broadcast,
    default_parallelism,
    gather_average,
    map_partitions,
)
from .io import read_corpus, read_csv, read_triplets, write_csv, write_triplets
from .learn import (
    Algorithm,
    AlsConfig,
    FactorizationModel,
    KMeansResult,
    LogisticModel,
    Model,
    Optimizer,
    RatingsMatrix,
    SgdConfig,
    WeightVector,
    als_objective,
    als_row_update,
    als_train,
    gradient_descent,
    k_means,
    logistic_gradient_summand,
    n_grams,
    observed_rmse,
    scaled_als_objective,
    sgd_optimize,
    sigmoid,
    tf_idf,
    train_logistic,
)
from .datagen import (
    ClassificationData,
    generate_classification_data,
    generate_ratings,
    tile_ratings,
)
from .experiments import (
    ExperimentConfig,
    ReportRow,
    ScalingReport,
    run_scaling,
    run_text_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "ParmlError", "SchemaError", "CastError", "EmptyTableError",
    "UserFunctionError", "DimError", "UnsupportedError", "SingularMatrixError",
    "DegenerateError", "DivergenceError", "ConfigError",
    "EMPTY", "MLNumericTable", "MLRow", "MLTable", "Schema", "ValueKind",
    "LocalMatrix", "SvdResult",
    "Broadcast", "PartitionTask", "WorkerPool", "broadcast",
    "default_parallelism", "gather_average", "map_partitions",
    "read_corpus", "read_csv", "read_triplets", "write_csv", "write_triplets",
    "Algorithm", "Model", "Optimizer",
    "SgdConfig", "WeightVector", "gradient_descent", "logistic_gradient_summand",
    "sgd_optimize", "sigmoid", "LogisticModel", "train_logistic",
    "AlsConfig", "FactorizationModel", "RatingsMatrix", "als_objective",
    "als_row_update", "als_train", "observed_rmse", "scaled_als_objective",
    "n_grams", "tf_idf", "KMeansResult", "k_means",
    "ClassificationData", "generate_classification_data", "generate_ratings",
    "tile_ratings",
    "ExperimentConfig", "ReportRow", "ScalingReport", "run_scaling",
    "run_text_pipeline",
    "__version__",
]
