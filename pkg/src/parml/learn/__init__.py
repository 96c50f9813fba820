"""Training algorithms, optimizers, models, and featurization."""

from .interfaces import Algorithm, Model, Optimizer
from .optimize import (
    SgdConfig,
    WeightVector,
    gradient_descent,
    logistic_gradient_summand,
    sgd_optimize,
    sigmoid,
)
from .logistic import LogisticModel, train_logistic
from .als import (
    AlsConfig,
    FactorizationModel,
    RatingsMatrix,
    als_objective,
    als_row_update,
    als_train,
    observed_rmse,
    scaled_als_objective,
)
from .features import n_grams, tf_idf
from .kmeans import KMeansResult, k_means

__all__ = [
    "Algorithm", "Model", "Optimizer",
    "SgdConfig", "WeightVector", "gradient_descent",
    "logistic_gradient_summand", "sgd_optimize", "sigmoid",
    "LogisticModel", "train_logistic",
    "AlsConfig", "FactorizationModel", "RatingsMatrix",
    "als_objective", "als_row_update", "als_train",
    "observed_rmse", "scaled_als_objective",
    "n_grams", "tf_idf",
    "KMeansResult", "k_means",
]
