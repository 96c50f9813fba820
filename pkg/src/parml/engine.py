"""Partitioned parallel execution: worker pool, gather-average, broadcast.

One process, many workers. Each round fans per-partition tasks out to a
thread pool, then the master phase runs sequentially: results are assembled
in ascending partition order no matter which worker finished first, so every
round is bit-reproducible for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateError, DimError, UserFunctionError


def default_parallelism() -> int:
    """Detected worker count for this machine."""
    return os.cpu_count() or 1


@dataclass(frozen=True)
class PartitionTask:
    """One unit of work: apply fn to the rows (or matrix view) of a partition."""

    partition_index: int
    input: object
    fn: Callable

    def run(self):
        try:
            return self.fn(self.input)
        except Exception as e:
            raise UserFunctionError(
                f"partition {self.partition_index}: {e}") from e


class WorkerPool:
    """Fixed-size thread pool that evaluates partition tasks concurrently.

    Results always come back in partition order regardless of completion
    order, so any round's output is independent of the worker count.
    """

    def __init__(self, workers: Optional[int] = None):
        workers = default_parallelism() if workers is None else int(workers)
        if workers < 1:
            raise ValueError(f"worker count must be >= 1, got {workers}")
        self._workers = workers
        self._executor = None

    @property
    def workers(self) -> int:
        return self._workers

    def run_tasks(self, tasks: Sequence[PartitionTask]) -> list:
        """Evaluate tasks concurrently; results ordered by partition index."""
        tasks = sorted(tasks, key=lambda t: t.partition_index)
        if not tasks:
            return []
        if self._workers == 1 or len(tasks) == 1:
            return [t.run() for t in tasks]
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self._workers)
        return list(self._executor.map(PartitionTask.run, tasks))

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def _partition_inputs(source) -> list:
    if hasattr(source, "partition_arrays"):
        return list(source.partition_arrays())
    if hasattr(source, "partitions"):
        return list(source.partitions)
    return list(source)


def map_partitions(source, fn: Callable, pool: Optional[WorkerPool] = None,
                   workers: Optional[int] = None) -> list:
    """Apply fn to every partition of a table (or sequence of partition inputs).

    Returns one result per partition, in partition order. A failing fn aborts
    the round with the partition index attached. Pass a pool to reuse threads
    across rounds; otherwise a transient pool of `workers` threads is used.
    """
    tasks = [PartitionTask(i, part, fn) for i, part in enumerate(_partition_inputs(source))]
    if pool is not None:
        return pool.run_tasks(tasks)
    with WorkerPool(workers) as transient:
        return transient.run_tasks(tasks)


def gather_average(results: Sequence) -> np.ndarray:
    """Weighted average of per-partition vectors at the master.

    Takes (vector, weight) pairs in partition order and accumulates
    sum(w_i/W * v_i) with W = sum of weights, skipping zero-weight entries.
    The normalized form keeps the average invariant under uniform weight
    scaling and returns the single contributing vector bit-exactly when only
    one partition has weight.
    """
    if not results:
        raise DegenerateError("gather_average of no results")
    vectors, weights = [], []
    for vec, w in results:
        vectors.append(np.asarray(vec, dtype=np.float64))
        weights.append(float(w))
    length = vectors[0].shape
    for i, v in enumerate(vectors):
        if v.shape != length:
            raise DimError(f"partition {i} vector shape {v.shape} != {length}")
    if any(w < 0 for w in weights):
        raise DegenerateError(f"negative weight in {weights}")
    total = 0.0
    for w in weights:
        total += w
    if total == 0.0:
        raise DegenerateError("all partition weights are zero")
    acc = None
    for v, w in zip(vectors, weights):
        if w == 0.0:
            continue
        scaled = (w / total) * v
        acc = scaled if acc is None else acc + scaled
    return acc


class Broadcast:
    """Read-only handle for a value every partition task of a round observes.

    In-process stand-in for a one-to-many broadcast: all tasks see the same
    object, which must not be mutated after construction.
    """

    __slots__ = ("_value",)

    def __init__(self, value):
        self._value = value

    @property
    def value(self):
        return self._value

    def __repr__(self):
        return f"Broadcast({self._value!r})"


def broadcast(value) -> Broadcast:
    """Publish an immutable value to all workers for the next round."""
    return Broadcast(value)
