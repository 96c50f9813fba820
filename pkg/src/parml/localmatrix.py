"""Partition-local matrices with dense and CSR storage.

A LocalMatrix is the unit of numerical work inside one partition: dense
matrices are row-major float64 buffers, sparse matrices are canonical CSR
(no explicit zeros, strictly increasing column indices within each row).
All kernels (products, solve, svd, eigen) give the same values for both
encodings of the same matrix; CSR exists so that algorithms can iterate
observed entries in O(nnz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimError, SingularMatrixError, UnsupportedError

_PIVOT_TOL = 1e-12
_RANK_RTOL = 1e-10
_SYMMETRY_TOL = 1e-10


def _as_2d_float(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimError(f"expected a 1-D or 2-D array, got ndim={arr.ndim}")
    return arr


def _normalize_selector(sel, dim: int):
    """Turn an int / sequence / slice selector into ('scalar', i) or ('vector', idx)."""
    if isinstance(sel, (int, np.integer)):
        i = int(sel)
        if i < -dim or i >= dim:
            raise IndexError(f"index {i} out of range for dimension of size {dim}")
        return "scalar", i % dim if dim else 0
    if isinstance(sel, slice):
        return "vector", np.arange(*sel.indices(dim), dtype=np.int64)
    idx = np.asarray(sel)
    if idx.ndim != 1 or not np.issubdtype(idx.dtype, np.integer):
        raise IndexError(f"selector must be an int, slice, or integer sequence, got {sel!r}")
    idx = idx.astype(np.int64)
    if idx.size and (idx.min() < -dim or idx.max() >= dim):
        raise IndexError(f"selector {sel!r} out of range for dimension of size {dim}")
    return "vector", np.where(idx < 0, idx + dim, idx)


class LocalMatrix:
    """A dense or CSR-sparse float64 matrix confined to one partition."""

    __slots__ = ("_shape", "_dense", "_indptr", "_indices", "_data")

    def __init__(self):
        raise TypeError("use LocalMatrix.dense/csr/from_triplets/zeros/identity")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def _new_dense(cls, arr: np.ndarray) -> "LocalMatrix":
        m = object.__new__(cls)
        m._shape = arr.shape
        m._dense = arr
        m._indptr = m._indices = m._data = None
        return m

    @classmethod
    def _new_csr(cls, indptr, indices, data, shape) -> "LocalMatrix":
        m = object.__new__(cls)
        m._shape = (int(shape[0]), int(shape[1]))
        m._dense = None
        m._indptr = indptr
        m._indices = indices
        m._data = data
        return m

    @classmethod
    def dense(cls, values, copy: bool = True) -> "LocalMatrix":
        """Dense matrix from array-like values (1-D input becomes a row vector)."""
        arr = _as_2d_float(values)
        arr = np.array(arr, dtype=np.float64, order="C", copy=copy or not arr.flags.c_contiguous)
        return cls._new_dense(arr)

    @classmethod
    def csr(cls, indptr, indices, data, shape) -> "LocalMatrix":
        """CSR matrix from raw arrays; validates canonical form."""
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        data = np.asarray(data, dtype=np.float64)
        rows, cols = int(shape[0]), int(shape[1])
        if indptr.shape != (rows + 1,):
            raise ValueError(f"indptr must have length rows+1={rows + 1}, got {indptr.shape}")
        if indptr[0] != 0 or indptr[-1] != len(data) or np.any(np.diff(indptr) < 0):
            raise ValueError("indptr must start at 0, be non-decreasing, and end at nnz")
        if len(indices) != len(data):
            raise ValueError("indices and data must have equal length")
        if len(indices):
            if indices.min() < 0 or indices.max() >= cols:
                raise ValueError("column index out of range")
            row_of = np.repeat(np.arange(rows, dtype=np.int64), np.diff(indptr))
            if len(indices) > 1 and not np.all(
                (np.diff(indices) > 0) | (np.diff(row_of) > 0)
            ):
                raise ValueError("column indices must be strictly increasing within each row")
        if np.any(data == 0.0):
            raise ValueError("canonical CSR stores no explicit zeros")
        return cls._new_csr(indptr.copy(), indices.copy(), data.copy(), (rows, cols))

    @classmethod
    def from_triplets(cls, rows, cols, values, shape) -> "LocalMatrix":
        """CSR matrix from (row, col, value) triplets; exact zeros are dropped."""
        r = np.asarray(rows, dtype=np.int64)
        c = np.asarray(cols, dtype=np.int64)
        v = np.asarray(values, dtype=np.float64)
        if not (r.shape == c.shape == v.shape) or r.ndim != 1:
            raise DimError("triplet arrays must be 1-D and equally long")
        nrows, ncols = int(shape[0]), int(shape[1])
        if r.size:
            if r.min() < 0 or r.max() >= nrows or c.min() < 0 or c.max() >= ncols:
                raise IndexError("triplet coordinate out of range")
        keep = v != 0.0
        r, c, v = r[keep], c[keep], v[keep]
        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], v[order]
        if r.size > 1 and np.any((np.diff(r) == 0) & (np.diff(c) == 0)):
            raise ValueError("duplicate (row, col) entry in triplets")
        indptr = np.zeros(nrows + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=nrows), out=indptr[1:])
        return cls._new_csr(indptr, c, v, (nrows, ncols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "LocalMatrix":
        return cls._new_dense(np.zeros((rows, cols)))

    @classmethod
    def identity(cls, n: int) -> "LocalMatrix":
        return cls._new_dense(np.eye(n))

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def shape(self) -> tuple[int, int]:
        """Matrix dimensions as (rows, cols)."""
        return self._shape

    @property
    def num_rows(self) -> int:
        return self._shape[0]

    @property
    def num_cols(self) -> int:
        return self._shape[1]

    @property
    def is_sparse(self) -> bool:
        return self._dense is None

    @property
    def nnz(self) -> int:
        """Stored entries for CSR; count of nonzero cells for dense."""
        if self.is_sparse:
            return len(self._data)
        return int(np.count_nonzero(self._dense))

    def csr_parts(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Copies of (indptr, indices, data); sparse matrices only."""
        if not self.is_sparse:
            raise UnsupportedError("csr_parts requires CSR storage")
        return self._indptr.copy(), self._indices.copy(), self._data.copy()

    def to_array(self) -> np.ndarray:
        """Dense numpy copy of the values."""
        if not self.is_sparse:
            return self._dense.copy()
        out = np.zeros(self._shape)
        row_of = np.repeat(np.arange(self._shape[0]), np.diff(self._indptr))
        out[row_of, self._indices] = self._data
        return out

    def to_dense(self) -> "LocalMatrix":
        return LocalMatrix._new_dense(self.to_array())

    def to_csr(self) -> "LocalMatrix":
        if self.is_sparse:
            return LocalMatrix._new_csr(
                self._indptr.copy(), self._indices.copy(), self._data.copy(), self._shape
            )
        rows, cols = np.nonzero(self._dense)
        return LocalMatrix.from_triplets(rows, cols, self._dense[rows, cols], self._shape)

    def copy(self) -> "LocalMatrix":
        return self.to_csr() if self.is_sparse else LocalMatrix._new_dense(self._dense.copy())

    def equals(self, other: "LocalMatrix") -> bool:
        """Exact value equality, independent of storage layout."""
        return self._shape == other._shape and np.array_equal(self.to_array(), other.to_array())

    def __repr__(self):
        kind = "csr" if self.is_sparse else "dense"
        return f"LocalMatrix({kind}, {self._shape[0]}x{self._shape[1]})"

    # ------------------------------------------------------------------
    # composition

    def stack_rows(self, other: "LocalMatrix") -> "LocalMatrix":
        """Concatenate row-wise; column counts must match."""
        if self.num_cols != other.num_cols:
            raise DimError(f"stack_rows: {self.num_cols} cols vs {other.num_cols}")
        if self.is_sparse and other.is_sparse:
            indptr = np.concatenate([self._indptr, self._indptr[-1] + other._indptr[1:]])
            return LocalMatrix._new_csr(
                indptr,
                np.concatenate([self._indices, other._indices]),
                np.concatenate([self._data, other._data]),
                (self.num_rows + other.num_rows, self.num_cols),
            )
        return LocalMatrix._new_dense(np.vstack([self.to_array(), other.to_array()]))

    def concat_cols(self, other: "LocalMatrix") -> "LocalMatrix":
        """Concatenate column-wise; row counts must match."""
        if self.num_rows != other.num_rows:
            raise DimError(f"concat_cols: {self.num_rows} rows vs {other.num_rows}")
        if self.is_sparse and other.is_sparse:
            counts = np.diff(self._indptr) + np.diff(other._indptr)
            indptr = np.zeros(self.num_rows + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            indices = np.empty(indptr[-1], dtype=np.int64)
            data = np.empty(indptr[-1])
            for i in range(self.num_rows):
                a0, a1 = self._indptr[i], self._indptr[i + 1]
                b0, b1 = other._indptr[i], other._indptr[i + 1]
                o = indptr[i]
                indices[o : o + a1 - a0] = self._indices[a0:a1]
                data[o : o + a1 - a0] = self._data[a0:a1]
                o += a1 - a0
                indices[o : o + b1 - b0] = other._indices[b0:b1] + self.num_cols
                data[o : o + b1 - b0] = other._data[b0:b1]
            return LocalMatrix._new_csr(
                indptr, indices, data, (self.num_rows, self.num_cols + other.num_cols)
            )
        return LocalMatrix._new_dense(np.hstack([self.to_array(), other.to_array()]))

    # ------------------------------------------------------------------
    # indexing

    def __getitem__(self, key):
        if not (isinstance(key, tuple) and len(key) == 2):
            raise IndexError("indexing requires a (row, col) selector pair")
        rkind, rsel = _normalize_selector(key[0], self.num_rows)
        ckind, csel = _normalize_selector(key[1], self.num_cols)
        if rkind == "scalar" and ckind == "scalar":
            if self.is_sparse:
                s, e = self._indptr[rsel], self._indptr[rsel + 1]
                pos = np.searchsorted(self._indices[s:e], csel)
                if pos < e - s and self._indices[s + pos] == csel:
                    return float(self._data[s + pos])
                return 0.0
            return float(self._dense[rsel, csel])
        rows = np.array([rsel], dtype=np.int64) if rkind == "scalar" else rsel
        cols = np.array([csel], dtype=np.int64) if ckind == "scalar" else csel
        sub = self.to_array()[np.ix_(rows, cols)] if self.is_sparse else self._dense[np.ix_(rows, cols)].copy()
        return LocalMatrix._new_dense(sub)

    def __setitem__(self, key, value):
        if self.is_sparse:
            raise UnsupportedError("in-place update is only defined for dense storage")
        if not (isinstance(key, tuple) and len(key) == 2):
            raise IndexError("indexing requires a (row, col) selector pair")
        rkind, rsel = _normalize_selector(key[0], self.num_rows)
        ckind, csel = _normalize_selector(key[1], self.num_cols)
        rows = np.array([rsel], dtype=np.int64) if rkind == "scalar" else rsel
        cols = np.array([csel], dtype=np.int64) if ckind == "scalar" else csel
        if np.isscalar(value) or (isinstance(value, np.ndarray) and value.ndim == 0):
            self._dense[np.ix_(rows, cols)] = float(value)
            return
        src = value.to_array() if isinstance(value, LocalMatrix) else _as_2d_float(value)
        if src.shape != (len(rows), len(cols)):
            raise DimError(f"assigned block {src.shape} does not fit region {(len(rows), len(cols))}")
        self._dense[np.ix_(rows, cols)] = src

    def non_zero_indices(self, row: int) -> np.ndarray:
        """Strictly increasing column indices of the nonzero entries in one row.

        O(nnz in row) for CSR storage.
        """
        if row < 0 or row >= self.num_rows:
            raise IndexError(f"row {row} out of range for {self.num_rows} rows")
        if self.is_sparse:
            return self._indices[self._indptr[row] : self._indptr[row + 1]].copy()
        return np.nonzero(self._dense[row])[0].astype(np.int64)

    def sparse_row(self, row: int) -> tuple[np.ndarray, np.ndarray]:
        """(column indices, values) of the nonzero entries in one row."""
        idx = self.non_zero_indices(row)
        if self.is_sparse:
            s, e = self._indptr[row], self._indptr[row + 1]
            return idx, self._data[s:e].copy()
        return idx, self._dense[row, idx].copy()

    # ------------------------------------------------------------------
    # elementwise arithmetic

    def _combine_sparse(self, other: "LocalMatrix", subtract: bool) -> "LocalMatrix":
        ar = np.repeat(np.arange(self.num_rows, dtype=np.int64), np.diff(self._indptr))
        br = np.repeat(np.arange(other.num_rows, dtype=np.int64), np.diff(other._indptr))
        rows = np.concatenate([ar, br])
        cols = np.concatenate([self._indices, other._indices])
        vals = np.concatenate([self._data, -other._data if subtract else other._data])
        if rows.size == 0:
            return LocalMatrix.from_triplets([], [], [], self._shape)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        boundary = np.concatenate([[True], (np.diff(rows) != 0) | (np.diff(cols) != 0)])
        starts = np.nonzero(boundary)[0]
        summed = np.add.reduceat(vals, starts)
        return LocalMatrix.from_triplets(rows[boundary], cols[boundary], summed, self._shape)

    def _elementwise(self, other, op: str, reflected: bool = False) -> "LocalMatrix":
        if isinstance(other, LocalMatrix):
            if self._shape != other._shape:
                raise DimError(f"elementwise {op}: shapes {self._shape} vs {other._shape}")
            if self.is_sparse and other.is_sparse and op in ("+", "-") and not reflected:
                return self._combine_sparse(other, subtract=op == "-")
            rhs = other.to_array()
        elif np.isscalar(other):
            rhs = float(other)
            if op == "*" and self.is_sparse and math.isfinite(rhs):
                scaled = self._data * rhs
                keep = scaled != 0.0
                row_of = np.repeat(np.arange(self.num_rows, dtype=np.int64), np.diff(self._indptr))
                return LocalMatrix.from_triplets(
                    row_of[keep], self._indices[keep], scaled[keep], self._shape
                )
        else:
            return NotImplemented
        lhs = self.to_array()
        if reflected:
            lhs, rhs = rhs, lhs
        with np.errstate(divide="ignore", invalid="ignore"):
            if op == "+":
                out = lhs + rhs
            elif op == "-":
                out = lhs - rhs
            elif op == "*":
                out = lhs * rhs
            else:
                out = lhs / rhs
        return LocalMatrix._new_dense(out)

    def __add__(self, other):
        return self._elementwise(other, "+")

    def __radd__(self, other):
        return self._elementwise(other, "+", reflected=True)

    def __sub__(self, other):
        return self._elementwise(other, "-")

    def __rsub__(self, other):
        return self._elementwise(other, "-", reflected=True)

    def __mul__(self, other):
        return self._elementwise(other, "*")

    def __rmul__(self, other):
        return self._elementwise(other, "*", reflected=True)

    def __truediv__(self, other):
        return self._elementwise(other, "/")

    def __rtruediv__(self, other):
        return self._elementwise(other, "/", reflected=True)

    # ------------------------------------------------------------------
    # products

    def times(self, other: "LocalMatrix") -> "LocalMatrix":
        """Matrix product; a CSR left operand is used without densifying it."""
        if self.num_cols != other.num_rows:
            raise DimError(f"times: inner dims {self.num_cols} vs {other.num_rows}")
        if self.is_sparse:
            rhs = other.to_array() if other.is_sparse else other._dense
            out = np.zeros((self.num_rows, other.num_cols))
            for i in range(self.num_rows):
                s, e = self._indptr[i], self._indptr[i + 1]
                if e > s:
                    out[i] = self._data[s:e] @ rhs[self._indices[s:e]]
            return LocalMatrix._new_dense(out)
        rhs = other.to_array() if other.is_sparse else other._dense
        return LocalMatrix._new_dense(self._dense @ rhs)

    def __matmul__(self, other):
        return self.times(other)

    def dot(self, other: "LocalMatrix") -> float:
        """Inner product of two vectors (matrices with a unit dimension)."""
        if min(self._shape) > 1 or min(other._shape) > 1:
            raise DimError("dot requires vector-shaped operands")
        a = self.to_array().ravel()
        b = other.to_array().ravel()
        if a.size != b.size:
            raise DimError(f"dot: lengths {a.size} vs {b.size}")
        return float(np.dot(a, b))

    def transpose(self) -> "LocalMatrix":
        if not self.is_sparse:
            return LocalMatrix._new_dense(np.ascontiguousarray(self._dense.T))
        row_of = np.repeat(np.arange(self.num_rows, dtype=np.int64), np.diff(self._indptr))
        order = np.lexsort((row_of, self._indices))
        counts = np.bincount(self._indices, minlength=self.num_cols)
        indptr = np.zeros(self.num_cols + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return LocalMatrix._new_csr(
            indptr, row_of[order], self._data[order], (self.num_cols, self.num_rows)
        )

    @property
    def T(self) -> "LocalMatrix":
        return self.transpose()

    # ------------------------------------------------------------------
    # linear algebra

    def solve(self, rhs) -> "LocalMatrix":
        """Solve self @ x = rhs by LU with partial pivoting.

        rhs may be a vector (returned as an n x 1 matrix) or a matrix.
        Raises SingularMatrixError when a pivot falls below 1e-12.
        """
        if self.num_rows != self.num_cols:
            raise DimError(f"solve requires a square matrix, got {self._shape}")
        a = self.to_array()
        if isinstance(rhs, LocalMatrix):
            b = rhs.to_array()
        else:
            b = np.asarray(rhs, dtype=np.float64)
        vector_rhs = b.ndim == 1
        if vector_rhs:
            b = b.reshape(-1, 1)
        elif b.ndim == 2 and b.shape[0] == 1 and self.num_rows != 1:
            b = b.T.copy()
            vector_rhs = True
        if b.shape[0] != self.num_rows:
            raise DimError(f"solve: rhs has {b.shape[0]} rows, expected {self.num_rows}")
        x = _lu_solve(a, b.copy())
        return LocalMatrix._new_dense(x)

    def solve_vector(self, rhs) -> np.ndarray:
        """Solve with a 1-D right-hand side, returned as a 1-D array."""
        return self.solve(np.asarray(rhs, dtype=np.float64).ravel()).to_array().ravel()

    def svd(self) -> "SvdResult":
        """Thin singular value decomposition via one-sided Jacobi rotations."""
        a = self.to_array()
        u, s, v = _jacobi_svd(a)
        return SvdResult(LocalMatrix._new_dense(u), s, LocalMatrix._new_dense(v))

    def eigen(self) -> tuple[np.ndarray, "LocalMatrix"]:
        """Eigenvalues (descending) and eigenvectors of a symmetric matrix."""
        if self.num_rows != self.num_cols:
            raise DimError(f"eigen requires a square matrix, got {self._shape}")
        a = self.to_array()
        if a.size and np.max(np.abs(a - a.T)) > _SYMMETRY_TOL:
            raise UnsupportedError("eigen is only defined for symmetric matrices")
        values, vectors = _jacobi_eigen(a)
        return values, LocalMatrix._new_dense(vectors)

    def rank(self) -> int:
        """Numerical rank: singular values above 1e-10 times the largest."""
        if 0 in self._shape:
            return 0
        s = self.svd().singular_values
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.count_nonzero(s > _RANK_RTOL * s[0]))


@dataclass
class SvdResult:
    """Thin SVD: matrix == u @ diag(singular_values) @ v.T."""

    u: LocalMatrix
    singular_values: np.ndarray
    v: LocalMatrix

    def reconstruct(self) -> np.ndarray:
        return self.u.to_array() @ np.diag(self.singular_values) @ self.v.to_array().T


def _lu_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting; mutates both arguments."""
    n = a.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) <= _PIVOT_TOL:
            raise SingularMatrixError(f"pivot {a[piv, col]:.3e} at column {col}")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        factors = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(factors, a[col, col:])
        b[col + 1 :] -= np.outer(factors, b[col])
    x = np.empty_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def _jacobi_svd(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One-sided Jacobi SVD returning (u, s, v) with a == u @ diag(s) @ v.T."""
    m, n = a.shape
    if m == 0 or n == 0:
        k = min(m, n)
        return np.zeros((m, k)), np.zeros(k), np.zeros((n, k))
    if m < n:
        v, s, u = _jacobi_svd(np.ascontiguousarray(a.T))
        return u, s, v

    b = a.copy()
    v = np.eye(n)
    for _ in range(60):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                bp = b[:, p]
                bq = b[:, q]
                gamma = float(bp @ bq)
                if gamma == 0.0:
                    continue
                alpha = float(bp @ bp)
                beta = float(bq @ bq)
                if abs(gamma) <= 1e-14 * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                c = 1.0 / math.hypot(1.0, t)
                s = c * t
                new_p = c * bp - s * bq
                b[:, q] = s * bp + c * bq
                b[:, p] = new_p
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        if not rotated:
            break

    norms = np.sqrt(np.sum(b * b, axis=0))
    order = np.argsort(-norms, kind="stable")
    norms = norms[order]
    b = b[:, order]
    v = v[:, order]
    u = np.zeros((m, n))
    tiny = max(m, n) * np.finfo(np.float64).eps * (norms[0] if norms.size else 0.0)
    deficient = []
    for i in range(n):
        if norms[i] > tiny and norms[i] > 0.0:
            u[:, i] = b[:, i] / norms[i]
        else:
            norms[i] = 0.0
            deficient.append(i)
    for i in deficient:
        u[:, i] = _orthonormal_fill(u, i)
    return u, norms, v


def _orthonormal_fill(u: np.ndarray, col: int) -> np.ndarray:
    """A unit vector orthogonal to the already-filled columns of u."""
    m = u.shape[0]
    best, best_norm = None, -1.0
    for j in range(m):
        cand = np.zeros(m)
        cand[j] = 1.0
        cand -= u @ (u.T @ cand)
        nrm = float(np.linalg.norm(cand))
        if nrm > best_norm:
            best, best_norm = cand, nrm
        if nrm > 0.9:
            break
    return best / best_norm


def _jacobi_eigen(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix."""
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    work = a.copy()
    vectors = np.eye(n)
    norm = float(np.linalg.norm(work))
    if norm == 0.0:
        return np.zeros(n), vectors
    for _ in range(100):
        off = work.copy()
        np.fill_diagonal(off, 0.0)
        if float(np.linalg.norm(off)) <= 1e-13 * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if abs(apq) <= 1e-15 * norm:
                    continue
                tau = (work[q, q] - work[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = c * t
                rot_p = c * work[:, p] - s * work[:, q]
                work[:, q] = s * work[:, p] + c * work[:, q]
                work[:, p] = rot_p
                rot_p = c * work[p, :] - s * work[q, :]
                work[q, :] = s * work[p, :] + c * work[q, :]
                work[p, :] = rot_p
                rot_p = c * vectors[:, p] - s * vectors[:, q]
                vectors[:, q] = s * vectors[:, p] + c * vectors[:, q]
                vectors[:, p] = rot_p
    values = np.diag(work).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]
