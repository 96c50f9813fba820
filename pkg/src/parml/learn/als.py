"""Alternating least squares for sparse rating matrices.

The ratings live in two CSR encodings, one by user row and one by item row
(the transposed copy), so both half-sweeps can read their rows in O(nnz).
Each half-sweep solves the closed-form normal equations per row with the
other factor fixed and broadcast; updates are exact and independent per row,
so results do not depend on how rows are partitioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import engine
from ..errors import ConfigError, DimError, DivergenceError, SingularMatrixError
from ..localmatrix import LocalMatrix, _lu_solve
from .interfaces import Model


class RatingsMatrix:
    """Observed entries of an m x n ratings matrix, CSR by user and by item.

    Both encodings hold the identical entry multiset. Entries with value
    exactly 0 are treated as unobserved (canonical CSR stores no zeros).
    """

    def __init__(self, matrix: LocalMatrix):
        self.by_user = matrix.to_csr()
        self.by_item = self.by_user.transpose()

    @classmethod
    def from_triplets(cls, users, items, ratings, shape=None) -> "RatingsMatrix":
        if shape is None:
            users = np.asarray(users)
            items = np.asarray(items)
            if users.size == 0:
                raise ValueError("no entries and no explicit shape")
            shape = (int(users.max()) + 1, int(items.max()) + 1)
        return cls(LocalMatrix.from_triplets(users, items, ratings, shape))

    @property
    def num_users(self) -> int:
        return self.by_user.num_rows

    @property
    def num_items(self) -> int:
        return self.by_user.num_cols

    @property
    def nnz(self) -> int:
        return self.by_user.nnz

    def user_row(self, u: int):
        """(item indices, rating values) observed for one user."""
        return self.by_user.sparse_row(u)

    def item_row(self, j: int):
        """(user indices, rating values) observed for one item."""
        return self.by_item.sparse_row(j)

    def __repr__(self):
        return f"RatingsMatrix({self.num_users}x{self.num_items}, nnz={self.nnz})"


@dataclass(frozen=True)
class AlsConfig:
    """ALS hyperparameters; defaults are rank 10, lambda 0.01, 10 iterations."""

    rank: int = 10
    lam: float = 0.01
    iterations: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise ConfigError(f"rank must be >= 1, got {self.rank}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be non-negative, got {self.lam}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")


def als_row_update(factor_fixed, indices, values, lam: float) -> np.ndarray:
    """Closed-form update of one row against the fixed factor.

    Solves (B^T B + lam * nnz * I) u = B^T r where B stacks the fixed
    factor's rows at the observed indices and r holds the observed ratings.
    The regularizer is scaled by the row's observation count. A row with no
    observations returns the zero vector when lam > 0.
    """
    f = factor_fixed.to_array() if isinstance(factor_fixed, LocalMatrix) else np.asarray(
        factor_fixed, dtype=np.float64)
    k = f.shape[1]
    indices = np.asarray(indices, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    nnz = len(indices)
    if nnz == 0:
        if lam > 0:
            return np.zeros(k)
        raise SingularMatrixError("row has no observed ratings and lam is zero")
    b = f[indices]
    a = b.T @ b + (lam * nnz) * np.eye(k)
    rhs = b.T @ values
    return _lu_solve(a, rhs.reshape(-1, 1)).ravel()


def _half_sweep(fixed_broadcast, row_fn, row_ids_parts, lam, k, pool):
    def task(ids, _fb=fixed_broadcast):
        if len(ids) == 0:
            return np.zeros((0, k))
        return np.vstack([als_row_update(_fb.value, *row_fn(int(r)), lam) for r in ids])

    blocks = engine.map_partitions(row_ids_parts, task, pool=pool)
    return np.vstack(blocks)


def als_train(ratings: RatingsMatrix, config: AlsConfig, pool=None, workers=None,
              record_objective: bool = True) -> "FactorizationModel":
    """Alternating minimization: V initialized from the seed, U solved first.

    Each iteration runs a U half-sweep (item factor fixed and broadcast) then
    a V half-sweep. The returned model carries `half_sweep_objectives`, the
    scaled-regularizer objective after every half-sweep, which alternating
    minimization makes non-increasing.
    """
    if ratings.nnz == 0:
        raise ValueError("ratings matrix has no observed entries")
    m, n, k = ratings.num_users, ratings.num_items, config.rank
    rng = np.random.default_rng(config.seed)
    v = rng.random((n, k)) / math.sqrt(k)
    u = np.zeros((m, k))

    own_pool = pool is None
    pool = pool or engine.WorkerPool(workers)
    parts = pool.workers
    user_parts = np.array_split(np.arange(m), parts)
    item_parts = np.array_split(np.arange(n), parts)
    history = []
    try:
        for _ in range(config.iterations):
            u = _half_sweep(engine.broadcast(v), ratings.user_row, user_parts,
                            config.lam, k, pool)
            if record_objective:
                history.append(_scaled_objective(u, v, ratings, config.lam))
            v = _half_sweep(engine.broadcast(u), ratings.item_row, item_parts,
                            config.lam, k, pool)
            if record_objective:
                history.append(_scaled_objective(u, v, ratings, config.lam))
    finally:
        if own_pool:
            pool.close()
    model = FactorizationModel(u, v)
    model.half_sweep_objectives = history
    return model


def _squared_residuals(u: np.ndarray, v: np.ndarray, ratings: RatingsMatrix) -> float:
    indptr, indices, data = ratings.by_user.csr_parts()
    if len(data) == 0:
        return 0.0
    row_of = np.repeat(np.arange(ratings.num_users), np.diff(indptr))
    pred = np.sum(u[row_of] * v[indices], axis=1)
    return float(np.sum((data - pred) ** 2))


def _factor_arrays(model_or_u, v=None):
    if v is not None:
        u = model_or_u
        return (u.to_array() if isinstance(u, LocalMatrix) else np.asarray(u),
                v.to_array() if isinstance(v, LocalMatrix) else np.asarray(v))
    return model_or_u.u.to_array(), model_or_u.v.to_array()


def als_objective(model, ratings: RatingsMatrix, lam: float) -> float:
    """The literal objective: squared error over observed entries plus
    lam * (||U||_F^2 + ||V||_F^2), with the unscaled regularizer."""
    u, v = _factor_arrays(model)
    _check_factor_dims(u, v, ratings)
    return _squared_residuals(u, v, ratings) + lam * (
        float(np.sum(u * u)) + float(np.sum(v * v)))


def scaled_als_objective(model, ratings: RatingsMatrix, lam: float) -> float:
    """The objective the row solves actually minimize: each row's regularizer
    is scaled by its observation count."""
    u, v = _factor_arrays(model)
    _check_factor_dims(u, v, ratings)
    return _scaled_objective(u, v, ratings, lam)


def _scaled_objective(u: np.ndarray, v: np.ndarray, ratings: RatingsMatrix,
                      lam: float) -> float:
    user_counts = np.diff(ratings.by_user.csr_parts()[0])
    item_counts = np.diff(ratings.by_item.csr_parts()[0])
    reg = float(user_counts @ np.sum(u * u, axis=1) + item_counts @ np.sum(v * v, axis=1))
    return _squared_residuals(u, v, ratings) + lam * reg


def observed_rmse(model, ratings: RatingsMatrix) -> float:
    """Root mean squared error over the observed entries."""
    u, v = _factor_arrays(model)
    _check_factor_dims(u, v, ratings)
    return math.sqrt(_squared_residuals(u, v, ratings) / ratings.nnz)


def _check_factor_dims(u: np.ndarray, v: np.ndarray, ratings: RatingsMatrix):
    if u.shape[0] != ratings.num_users or v.shape[0] != ratings.num_items:
        raise DimError(
            f"factors {u.shape} x {v.shape} do not fit "
            f"{ratings.num_users} x {ratings.num_items} ratings")
    if u.shape[1] != v.shape[1]:
        raise DimError(f"factor ranks differ: {u.shape[1]} vs {v.shape[1]}")


class FactorizationModel(Model):
    """Low-rank model U V^T; predict(i, j) is the dot of row factors."""

    def __init__(self, u, v):
        u_arr = u.to_array() if isinstance(u, LocalMatrix) else np.asarray(u, dtype=np.float64)
        v_arr = v.to_array() if isinstance(v, LocalMatrix) else np.asarray(v, dtype=np.float64)
        if u_arr.ndim != 2 or v_arr.ndim != 2 or u_arr.shape[1] != v_arr.shape[1]:
            raise DimError(f"bad factor shapes {u_arr.shape}, {v_arr.shape}")
        if not (np.isfinite(u_arr).all() and np.isfinite(v_arr).all()):
            raise DivergenceError("factor matrices have non-finite entries")
        self.u = LocalMatrix.dense(u_arr)
        self.v = LocalMatrix.dense(v_arr)
        self.half_sweep_objectives: list = []

    @property
    def rank(self) -> int:
        return self.u.num_cols

    @property
    def user_factors(self) -> LocalMatrix:
        return self.u

    @property
    def item_factors(self) -> LocalMatrix:
        return self.v

    def predict(self, i: int, j: int) -> float:
        return float(self.u.to_array()[i] @ self.v.to_array()[j])

    def save(self, path):
        """Plain text: `m n k` line, then row-major U then V, one value per line."""
        u, v = self.u.to_array(), self.v.to_array()
        lines = [f"{u.shape[0]} {v.shape[0]} {u.shape[1]}"]
        lines += [repr(float(x)) for x in u.ravel()]
        lines += [repr(float(x)) for x in v.ravel()]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "FactorizationModel":
        text = Path(path).read_text().split()
        m, n, k = int(text[0]), int(text[1]), int(text[2])
        vals = [float(x) for x in text[3:]]
        if len(vals) != m * k + n * k:
            raise ValueError(f"{path}: expected {m * k + n * k} values, found {len(vals)}")
        u = np.array(vals[: m * k]).reshape(m, k)
        v = np.array(vals[m * k :]).reshape(n, k)
        return cls(u, v)

    def __repr__(self):
        return (f"FactorizationModel({self.u.num_rows}x{self.v.num_rows}, "
                f"k={self.rank})")
