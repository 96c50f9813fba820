"""K-means clustering (Lloyd's algorithm) over partitioned numeric tables.

Each iteration broadcasts the centroids, assigns every partition's rows to
their nearest centroid (ties to the lowest centroid index), and gathers
per-cluster partial sums and counts at the master for the centroid update.
An empty cluster keeps its previous centroid. Iteration stops at the budget
or as soon as the assignment vector repeats exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import engine
from ..errors import ConfigError


@dataclass
class KMeansResult:
    """Final centroids and the last assignment vector.

    When converged is True the assignments are a fixpoint of the returned
    centroids; on budget exhaustion the centroids carry one further update.
    """

    centroids: np.ndarray
    assignments: np.ndarray
    cost_history: list = field(default_factory=list)
    iterations_run: int = 0
    converged: bool = False


def _row_at(parts, index: int) -> np.ndarray:
    for arr in parts:
        if index < len(arr):
            return np.array(arr[index])
        index -= len(arr)
    raise IndexError(index)


def _assign_partition(x: np.ndarray, centroids: np.ndarray):
    k, d = centroids.shape
    if len(x) == 0:
        return np.zeros((k, d)), np.zeros(k, dtype=np.int64), 0.0, np.zeros(0, dtype=np.int64)
    d2 = (np.sum(x * x, axis=1)[:, None] + np.sum(centroids * centroids, axis=1)[None, :]
          - 2.0 * (x @ centroids.T))
    assign = np.argmin(d2, axis=1)
    nearest = np.maximum(d2[np.arange(len(x)), assign], 0.0)
    sums = np.zeros((k, d))
    np.add.at(sums, assign, x)
    counts = np.bincount(assign, minlength=k).astype(np.int64)
    return sums, counts, float(np.sum(nearest)), assign


def k_means(data, k: int, iterations: int, seed: int = 0, pool=None,
            workers=None) -> KMeansResult:
    """Cluster the rows of a numeric table into k groups.

    Centroids are seeded by sampling k distinct rows. The recorded cost per
    iteration is the total squared distance of the assignment step, which is
    non-increasing across iterations.
    """
    parts = list(data.partition_arrays())
    n = sum(len(p) for p in parts)
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the {n} available rows")
    if iterations < 1:
        raise ConfigError(f"iterations must be >= 1, got {iterations}")

    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=k, replace=False)
    centroids = np.vstack([_row_at(parts, int(i)) for i in chosen])

    own_pool = pool is None
    pool = pool or engine.WorkerPool(workers)
    result = KMeansResult(centroids=centroids, assignments=np.zeros(0, dtype=np.int64))
    prev_assign = None
    try:
        for t in range(iterations):
            cb = engine.broadcast(centroids)
            partials = engine.map_partitions(
                parts, lambda x, _cb=cb: _assign_partition(x, _cb.value), pool=pool)
            sums = np.sum([p[0] for p in partials], axis=0)
            counts = np.sum([p[1] for p in partials], axis=0)
            cost = float(np.sum([p[2] for p in partials]))
            assignments = np.concatenate([p[3] for p in partials])

            result.cost_history.append(cost)
            result.assignments = assignments
            result.iterations_run = t + 1
            if prev_assign is not None and np.array_equal(assignments, prev_assign):
                result.converged = True
                break
            prev_assign = assignments

            nonempty = counts > 0
            updated = centroids.copy()
            updated[nonempty] = sums[nonempty] / counts[nonempty, None]
            centroids = updated
            result.centroids = centroids
    finally:
        if own_pool:
            pool.close()
    return result
