"""Logistic regression trained by local SGD with parameter averaging."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .interfaces import Algorithm, Model
from .optimize import (
    SgdConfig,
    WeightVector,
    _sigmoid_array,
    logistic_gradient_summand,
    sgd_optimize,
    sigmoid,
)


class LogisticModel(Model):
    """Binary classifier: predicts 1 iff sigmoid(w.x) >= 0.5."""

    def __init__(self, weights: WeightVector):
        if not isinstance(weights, WeightVector):
            weights = WeightVector(weights)
        self.weights = weights

    def predict_probability(self, x) -> float:
        return sigmoid(self.weights.values @ np.asarray(x, dtype=np.float64))

    def predict(self, x) -> int:
        # ties at exactly 0.5 go to class 1
        return 1 if self.predict_probability(x) >= 0.5 else 0

    def predict_all(self, data) -> np.ndarray:
        """Labels for every row of a numeric table (or 2-D array)."""
        x = data.to_matrix() if hasattr(data, "to_matrix") else np.asarray(data, dtype=np.float64)
        p = _sigmoid_array(x @ self.weights.values)
        return (p >= 0.5).astype(np.int64)

    def accuracy(self, data, labels) -> float:
        predicted = self.predict_all(data)
        labels = np.asarray(labels).ravel()
        return float(np.mean(predicted == labels.astype(np.int64)))

    def save(self, path):
        """Plain text: first line d, then one weight per line."""
        w = self.weights.values
        lines = [str(len(w))] + [repr(float(v)) for v in w]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "LogisticModel":
        lines = Path(path).read_text().split()
        d = int(lines[0])
        if len(lines) != d + 1:
            raise ValueError(f"{path}: expected {d} weights, found {len(lines) - 1}")
        return cls(WeightVector([float(v) for v in lines[1:]]))

    def __repr__(self):
        return f"LogisticModel(d={self.weights.d})"


class LogisticRegression(Algorithm):
    """Trains a LogisticModel via sgd_optimize with the logistic gradient."""

    def __init__(self, pool=None, workers=None):
        self._pool = pool
        self._workers = workers

    def train(self, data, labels, config: SgdConfig) -> LogisticModel:
        w = sgd_optimize(data, labels, config, logistic_gradient_summand,
                         pool=self._pool, workers=self._workers)
        return LogisticModel(w)


def train_logistic(data, labels, config: SgdConfig, pool=None,
                   workers=None) -> LogisticModel:
    """Fit a logistic model on a numeric table with 0/1 labels."""
    return LogisticRegression(pool=pool, workers=workers).train(data, labels, config)
