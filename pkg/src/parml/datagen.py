"""Synthetic dataset builders and the tiling data-growth mechanism."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .localmatrix import LocalMatrix
from .learn.als import RatingsMatrix
from .mltable import MLNumericTable


@dataclass
class ClassificationData:
    """Separable binary classification data plus its generating hyperplane."""

    table: MLNumericTable
    labels: np.ndarray
    weights: np.ndarray


def generate_classification_data(n: int, d: int, seed: int = 0,
                                 num_partitions: Optional[int] = None) -> ClassificationData:
    """Gaussian features labeled by a random unit hyperplane through the origin.

    Rows with margin |w.x| < 0.1 are rejected and redrawn, so the labels are
    linearly separable with margin at least 0.1. Same seed, same data.
    """
    if n < 1 or d < 1:
        raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(d)
    w /= np.linalg.norm(w)
    x = rng.standard_normal((n, d))
    margins = x @ w
    while True:
        bad = np.abs(margins) < 0.1
        if not bad.any():
            break
        x[bad] = rng.standard_normal((int(bad.sum()), d))
        margins[bad] = x[bad] @ w
    labels = (margins >= 0).astype(np.int64)
    table = MLNumericTable.from_array(x, num_partitions=num_partitions)
    return ClassificationData(table=table, labels=labels, weights=w)


def generate_ratings(num_users: int, num_items: int, rank: int, density: float,
                     noise: float = 0.0, seed: int = 0) -> RatingsMatrix:
    """Low-rank synthetic ratings with a Bernoulli(density) observation mask."""
    if num_users < 1 or num_items < 1 or rank < 1:
        raise ConfigError(
            f"need positive dims and rank, got {num_users}x{num_items}, rank={rank}")
    if not 0 < density <= 1:
        raise ConfigError(f"density must be in (0, 1], got {density}")
    rng = np.random.default_rng(seed)
    u0 = rng.standard_normal((num_users, rank)) / math.sqrt(rank)
    v0 = rng.standard_normal((num_items, rank)) / math.sqrt(rank)
    full = u0 @ v0.T
    if noise > 0:
        full = full + noise * rng.standard_normal(full.shape)
    mask = rng.random((num_users, num_items)) < density
    if not mask.any():
        raise ConfigError(
            f"density {density} produced no observed entries for "
            f"{num_users}x{num_items}")
    rows, cols = np.nonzero(mask)
    return RatingsMatrix.from_triplets(rows, cols, full[rows, cols],
                                       shape=(num_users, num_items))


def tile_ratings(base: RatingsMatrix, t: int) -> RatingsMatrix:
    """Block-diagonal tiling: t copies of base offset by (i*m, i*n).

    Multiplies nnz by t while keeping each block's sparsity structure, so the
    parameter count grows in a fixed manner.
    """
    if t < 1:
        raise ConfigError(f"tile factor must be >= 1, got {t}")
    if t == 1:
        return base
    indptr, indices, data = base.by_user.csr_parts()
    m, n = base.num_users, base.num_items
    nnz = len(data)
    new_indptr = np.concatenate(
        [indptr[:-1] + i * nnz for i in range(t)] + [np.array([t * nnz])])
    new_indices = np.concatenate([indices + i * n for i in range(t)])
    new_data = np.tile(data, t)
    tiled = LocalMatrix.csr(new_indptr, new_indices, new_data, (t * m, t * n))
    return RatingsMatrix(tiled)
