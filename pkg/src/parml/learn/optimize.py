"""Gradient-based optimizers over partitioned numeric tables.

Both optimizers follow the same round structure: broadcast the current
weights, let every partition work on its own rows, gather the per-partition
results at the master as an example-weighted average, repeat. Full-batch
gradient descent sends back partial mean gradients; local SGD sends back
locally updated weight vectors. Everything is deterministic given the seed
and the partitioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import engine
from ..errors import ConfigError, DimError, DivergenceError, EmptyTableError


class WeightVector:
    """Learned parameter vector w in R^d; entries are always finite."""

    __slots__ = ("_w",)

    def __init__(self, values):
        w = np.array(values, dtype=np.float64).ravel()
        if not np.isfinite(w).all():
            raise DivergenceError("weight vector has non-finite entries")
        w.setflags(write=False)
        self._w = w

    @property
    def values(self) -> np.ndarray:
        return self._w

    @property
    def d(self) -> int:
        return len(self._w)

    def __len__(self):
        return len(self._w)

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return np.array_equal(self._w, other._w)

    __hash__ = None

    def __repr__(self):
        return f"WeightVector(d={len(self._w)})"


@dataclass(frozen=True)
class SgdConfig:
    """Hyperparameters shared by the gradient optimizers.

    learning_rate: step size eta applied to every update.
    rounds: number of broadcast/gather rounds T.
    local_passes: sequential SGD sweeps each partition runs per round.
    seed: base seed; per-partition shuffles derive from (seed, round, partition).
    """

    learning_rate: float
    rounds: int
    local_passes: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.local_passes < 1:
            raise ConfigError(f"local_passes must be >= 1, got {self.local_passes}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")


def sigmoid(x) -> float:
    """Logistic function 1/(1+exp(-x)), branch on sign so exp never overflows."""
    x = float(x)
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def _sigmoid_array(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _as_weights(w) -> np.ndarray:
    return w.values if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)


def logistic_gradient_summand(w, x, y) -> np.ndarray:
    """Per-example gradient (sigmoid(w.x) - y) * x of the logistic loss."""
    wv = _as_weights(w)
    xv = np.asarray(x, dtype=np.float64)
    if wv.shape != xv.shape:
        raise DimError(f"weights have shape {wv.shape}, example has {xv.shape}")
    return (sigmoid(wv @ xv) - float(y)) * xv


def _partitioned_labels(parts, labels, total_rows):
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if len(labels) != total_rows:
        raise DimError(f"{len(labels)} labels for {total_rows} rows")
    out, start = [], 0
    for arr in parts:
        out.append(labels[start : start + len(arr)])
        start += len(arr)
    return out


def _training_setup(data, labels):
    parts = list(data.partition_arrays())
    n = sum(len(p) for p in parts)
    if n == 0:
        raise EmptyTableError("cannot optimize over an empty table")
    return parts, _partitioned_labels(parts, labels, n), n, data.num_cols


def gradient_descent(data, labels, config: SgdConfig, pool=None, workers=None) -> WeightVector:
    """Full-batch logistic gradient descent from w = 0.

    Each round every partition returns its mean gradient summand; the master
    gathers the example-weighted average and scales by n to recover the full
    gradient sum, then steps w <- w - eta * grad.
    """
    parts, label_parts, n, d = _training_setup(data, labels)
    w = np.zeros(d)
    own_pool = pool is None
    pool = pool or engine.WorkerPool(workers)
    try:
        for t in range(config.rounds):
            wb = engine.broadcast(w)

            def task(payload, _wb=wb):
                x_p, y_p = payload
                if len(x_p) == 0:
                    return np.zeros(len(_wb.value)), 0.0
                p = _sigmoid_array(x_p @ _wb.value)
                return (p - y_p) @ x_p / len(x_p), float(len(x_p))

            results = engine.map_partitions(list(zip(parts, label_parts)), task, pool=pool)
            with np.errstate(over="ignore"):  # divergence is reported below
                grad = engine.gather_average(results) * float(n)
                w = w - config.learning_rate * grad
            if not np.isfinite(w).all():
                raise DivergenceError(f"non-finite weights after round {t}")
    finally:
        if own_pool:
            pool.close()
    return WeightVector(w)


def sgd_optimize(data, labels, config: SgdConfig, gradient_fn=None, pool=None,
                 workers=None) -> WeightVector:
    """Local SGD with parameter averaging.

    Each round: broadcast w; every partition copies it and runs
    config.local_passes sequential passes of per-example updates
    w <- w - eta * gradient_fn(w, x_i, y_i) over its rows, in an order drawn
    from a generator seeded with (seed, round, partition index); the master
    then averages the partition weights, weighted by example counts.

    gradient_fn defaults to the logistic summand.
    """
    grad_fn = gradient_fn if gradient_fn is not None else logistic_gradient_summand
    parts, label_parts, n, d = _training_setup(data, labels)
    eta = config.learning_rate
    w = np.zeros(d)
    own_pool = pool is None
    pool = pool or engine.WorkerPool(workers)
    try:
        for t in range(config.rounds):
            wb = engine.broadcast(w)

            def task(payload, _wb=wb, _t=t):
                idx, x_p, y_p = payload
                local_w = _wb.value.copy()
                n_p = len(x_p)
                if n_p == 0:
                    return local_w, 0.0
                rng = np.random.default_rng([config.seed, _t, idx])
                for _ in range(config.local_passes):
                    for i in rng.permutation(n_p):
                        g = grad_fn(local_w, x_p[i], y_p[i])
                        local_w -= eta * np.asarray(g, dtype=np.float64)
                return local_w, float(n_p)

            payloads = [(i, x, y) for i, (x, y) in enumerate(zip(parts, label_parts))]
            results = engine.map_partitions(payloads, task, pool=pool)
            w = engine.gather_average(results)
            if not np.isfinite(w).all():
                raise DivergenceError(f"non-finite weights after round {t}")
    finally:
        if own_pool:
            pool.close()
    return WeightVector(w)
