"""Schema-carrying, immutable, row-partitioned tables.

An MLTable holds heterogeneous rows (Str / Int / Bool / Scalar cells, any
cell may be Empty) split into ordered partitions; the logical row order is
the concatenation of partitions. Every operation returns a new table.
MLNumericTable is the all-Scalar variant that backs matrix work: it stores
one float64 array per partition and materializes rows only on demand.
"""

from __future__ import annotations

import enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (
    CastError,
    EmptyTableError,
    SchemaError,
    UnsupportedError,
    UserFunctionError,
)


class _EmptyType:
    """Singleton marker for a missing cell; equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Empty"

    def __reduce__(self):
        return (_EmptyType, ())

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


EMPTY = _EmptyType()


class ValueKind(enum.Enum):
    STR = "Str"
    INT = "Int"
    BOOL = "Bool"
    SCALAR = "Scalar"

    def __repr__(self):
        return f"ValueKind.{self.name}"


def kind_of(value) -> Optional[ValueKind]:
    """Kind of a cell value; None for Empty. Unsupported types raise SchemaError."""
    if value is EMPTY:
        return None
    if isinstance(value, (bool, np.bool_)):
        return ValueKind.BOOL
    if isinstance(value, (int, np.integer)):
        return ValueKind.INT
    if isinstance(value, (float, np.floating)):
        return ValueKind.SCALAR
    if isinstance(value, str):
        return ValueKind.STR
    raise SchemaError(f"unsupported cell value {value!r} of type {type(value).__name__}")


def _normalize_cell(value):
    if value is EMPTY:
        return EMPTY
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, str):
        return value
    raise SchemaError(f"unsupported cell value {value!r} of type {type(value).__name__}")


class MLRow(tuple):
    """One table row: a tuple of normalized cell values."""

    def __new__(cls, values):
        if isinstance(values, (str, bytes)) or not isinstance(values, Iterable):
            values = (values,)
        elif isinstance(values, np.ndarray):
            values = values.tolist()
        return super().__new__(cls, (_normalize_cell(v) for v in values))

    def __repr__(self):
        return f"MLRow({tuple(self)!r})"


class Schema:
    """Ordered column descriptions: (optional name, value kind) pairs."""

    __slots__ = ("_names", "_kinds")

    def __init__(self, columns: Iterable):
        names, kinds = [], []
        for col in columns:
            if isinstance(col, ValueKind):
                name, kind = None, col
            else:
                name, kind = col
            if name is not None and not isinstance(name, str):
                raise SchemaError(f"column name must be text or None, got {name!r}")
            if not isinstance(kind, ValueKind):
                raise SchemaError(f"column kind must be a ValueKind, got {kind!r}")
            names.append(name)
            kinds.append(kind)
        if not names:
            raise SchemaError("a schema needs at least one column")
        present = [n for n in names if n is not None]
        if len(present) != len(set(present)):
            raise SchemaError(f"duplicate column names in {present}")
        self._names = tuple(names)
        self._kinds = tuple(kinds)

    @property
    def names(self) -> tuple:
        return self._names

    @property
    def kinds(self) -> tuple:
        return self._kinds

    def __len__(self):
        return len(self._kinds)

    def __eq__(self, other):
        return (
            isinstance(other, Schema)
            and self._names == other._names
            and self._kinds == other._kinds
        )

    def __hash__(self):
        return hash((self._names, self._kinds))

    def __repr__(self):
        cols = ", ".join(
            f"{n or '_'}:{k.value}" for n, k in zip(self._names, self._kinds)
        )
        return f"Schema({cols})"

    def index_of(self, name: str) -> int:
        if name in self._names:
            return self._names.index(name)
        raise SchemaError(f"no column named {name!r}")

    def compatible_with(self, other: "Schema") -> bool:
        """Same kinds, and names agree wherever both sides define one."""
        if self._kinds != other._kinds:
            return False
        return all(
            a == b
            for a, b in zip(self._names, other._names)
            if a is not None and b is not None
        )

    def merge_names(self, other: "Schema") -> "Schema":
        names = [a if a is not None else b for a, b in zip(self._names, other._names)]
        return Schema(zip(names, self._kinds))

    def conform(self, row: MLRow, where: str = "row"):
        """Raise SchemaError unless the row matches this schema (Empty passes)."""
        if len(row) != len(self._kinds):
            raise SchemaError(
                f"{where} has {len(row)} cells, schema has {len(self._kinds)} columns"
            )
        for j, (value, kind) in enumerate(zip(row, self._kinds)):
            got = kind_of(value)
            if got is not None and got is not kind:
                raise SchemaError(
                    f"{where}, column {j}: expected {kind.value}, got {got.value} ({value!r})"
                )


def _infer_schema(rows: Sequence[MLRow], names=None) -> Schema:
    """Column kinds from the first non-Empty value seen; all-Empty columns are Scalar."""
    if not rows:
        raise SchemaError("cannot infer a schema from zero rows")
    width = len(rows[0])
    kinds: list = [None] * width
    for i, row in enumerate(rows):
        if len(row) != width:
            raise SchemaError(f"row {i} has {len(row)} cells, expected {width}")
        for j, value in enumerate(row):
            got = kind_of(value)
            if got is None:
                continue
            if kinds[j] is None:
                kinds[j] = got
            elif kinds[j] is not got:
                raise SchemaError(
                    f"row {i}, column {j}: kind {got.value} conflicts with {kinds[j].value}"
                )
    kinds = [k if k is not None else ValueKind.SCALAR for k in kinds]
    if names is None:
        names = [None] * width
    return Schema(zip(names, kinds))


def _split_evenly(rows: Sequence, parts: int) -> list:
    if parts < 1:
        raise ValueError(f"partition count must be >= 1, got {parts}")
    base, extra = divmod(len(rows), parts)
    out, start = [], 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        out.append(list(rows[start : start + size]))
        start += size
    return out


def _default_partitions() -> int:
    from . import engine

    return engine.default_parallelism()


class MLTable:
    """Immutable partitioned row collection with relational and map/reduce ops."""

    def __init__(self, schema: Schema, partitions: Sequence[Sequence], _validate=True):
        self._schema = schema
        parts = tuple(tuple(r if isinstance(r, MLRow) else MLRow(r) for r in p) for p in partitions)
        if not parts:
            parts = ((),)
        if _validate:
            i = 0
            for part in parts:
                for row in part:
                    schema.conform(row, where=f"row {i}")
                    i += 1
        self._partitions = parts

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_rows(cls, rows: Iterable, schema: Optional[Schema] = None,
                  names: Optional[Sequence] = None,
                  num_partitions: Optional[int] = None) -> "MLTable":
        """Table from an iterable of row-likes, evenly split into partitions."""
        materialized = [r if isinstance(r, MLRow) else MLRow(r) for r in rows]
        if schema is None:
            schema = _infer_schema(materialized, names)
        elif names is not None:
            raise ValueError("pass either schema or names, not both")
        if num_partitions is None:
            num_partitions = _default_partitions()
        return cls(schema, _split_evenly(materialized, num_partitions))

    @classmethod
    def empty(cls, schema: Schema, num_partitions: int = 1) -> "MLTable":
        return cls(schema, [[] for _ in range(num_partitions)], _validate=False)

    # ------------------------------------------------------------------
    # accessors

    @property
    def schema(self) -> Schema:
        return self._schema

    @property
    def partitions(self) -> tuple:
        """Rows grouped by partition, in partition order."""
        return self._partitions

    @property
    def num_partitions(self) -> int:
        return len(self._partitions)

    @property
    def num_rows(self) -> int:
        return sum(len(p) for p in self._partitions)

    @property
    def num_cols(self) -> int:
        return len(self._schema)

    def rows(self):
        for part in self._partitions:
            yield from part

    def collect(self) -> list:
        return list(self.rows())

    def repartition(self, num_partitions: int) -> "MLTable":
        return MLTable(self._schema, _split_evenly(self.collect(), num_partitions),
                       _validate=False)

    def __eq__(self, other):
        """Same schema and same logical row sequence; partitioning is not compared."""
        if not isinstance(other, MLTable):
            return NotImplemented
        return self._schema == other._schema and self.collect() == other.collect()

    __hash__ = None

    def __repr__(self):
        return (f"{type(self).__name__}({self.num_rows} rows x {self.num_cols} cols, "
                f"{self.num_partitions} partitions)")

    # ------------------------------------------------------------------
    # relational operations

    def _resolve_column(self, col) -> int:
        if isinstance(col, str):
            return self._schema.index_of(col)
        idx = int(col)
        if idx < 0 or idx >= self.num_cols:
            raise IndexError(f"column index {idx} out of range for {self.num_cols} columns")
        return idx

    def project(self, cols: Sequence) -> "MLTable":
        """Keep the given columns (indexes or names), in the given order."""
        picked = [self._resolve_column(c) for c in cols]
        names, seen = [], set()
        for j in picked:
            name = self._schema.names[j]
            names.append(None if name in seen and name is not None else name)
            seen.add(name)
        schema = Schema(zip(names, (self._schema.kinds[j] for j in picked)))
        parts = [[MLRow(tuple(row[j] for j in picked)) for row in part]
                 for part in self._partitions]
        return MLTable(schema, parts, _validate=False)

    def union(self, other: "MLTable") -> "MLTable":
        """Concatenate two tables with compatible schemas; self's rows come first."""
        if not self._schema.compatible_with(other._schema):
            raise SchemaError(f"cannot union {self._schema} with {other._schema}")
        schema = self._schema.merge_names(other._schema)
        return MLTable(schema, self._materialized_parts() + other._materialized_parts(),
                       _validate=False)

    def _materialized_parts(self) -> tuple:
        return self._partitions

    def filter(self, pred: Callable) -> "MLTable":
        """Keep rows where pred returns True; order and partition bounds preserved."""
        parts, i = [], 0
        for part in self._partitions:
            kept = []
            for row in part:
                try:
                    keep = pred(row)
                except Exception as e:
                    raise UserFunctionError(f"predicate failed on row {i}: {e}") from e
                if not isinstance(keep, (bool, np.bool_)):
                    raise UserFunctionError(
                        f"predicate returned non-boolean {keep!r} on row {i}")
                if keep:
                    kept.append(row)
                i += 1
            parts.append(kept)
        return MLTable(self._schema, parts, _validate=False)

    def join(self, other: "MLTable", keys: Sequence) -> "MLTable":
        """Inner equi-join on the given column positions (shared by both tables).

        Output columns are self's, then other's non-key columns. Rows with an
        Empty key cell never match. One output row per matching pair, ordered
        by self's rows.
        """
        key_idx = [self._resolve_column(k) for k in keys]
        for k in key_idx:
            if k >= other.num_cols:
                raise IndexError(f"key column {k} out of range for right table")
            if self._schema.kinds[k] is not other._schema.kinds[k]:
                raise SchemaError(
                    f"key column {k}: {self._schema.kinds[k].value} vs "
                    f"{other._schema.kinds[k].value}")
        keep_b = [j for j in range(other.num_cols) if j not in key_idx]

        by_key: dict = {}
        for brow in other.rows():
            key = tuple(brow[k] for k in key_idx)
            if any(v is EMPTY for v in key):
                continue
            by_key.setdefault(key, []).append(tuple(brow[j] for j in keep_b))

        a_names = list(self._schema.names)
        b_names = [other._schema.names[j] for j in keep_b]
        taken = {n for n in a_names if n is not None}
        b_names = [None if n in taken else n for n in b_names]
        schema = Schema(zip(a_names + b_names,
                            list(self._schema.kinds) + [other._schema.kinds[j] for j in keep_b]))

        parts = []
        for part in self._partitions:
            out = []
            for arow in part:
                key = tuple(arow[k] for k in key_idx)
                if any(v is EMPTY for v in key):
                    continue
                for tail in by_key.get(key, ()):
                    out.append(MLRow(tuple(arow) + tail))
            parts.append(out)
        return MLTable(schema, parts, _validate=False)

    # ------------------------------------------------------------------
    # map / reduce operations

    def _apply_rowwise(self, fn: Callable, flat: bool) -> "MLTable":
        parts, i = [], 0
        for part in self._partitions:
            out = []
            for row in part:
                try:
                    produced = fn(row)
                except Exception as e:
                    raise UserFunctionError(f"function failed on row {i}: {e}") from e
                if flat:
                    if produced is None or isinstance(produced, (str, bytes)):
                        raise UserFunctionError(
                            f"flat_map function must return an iterable of rows, "
                            f"got {produced!r} on row {i}")
                    out.extend(MLRow(r) for r in produced)
                else:
                    out.append(MLRow(produced))
                i += 1
            parts.append(out)
        all_rows = [r for p in parts for r in p]
        if not all_rows:
            schema = self._schema
        else:
            names = self._schema.names if len(all_rows[0]) == self.num_cols else None
            schema = _infer_schema(all_rows, names=names)
        return MLTable(schema, parts, _validate=False)

    def map(self, fn: Callable) -> "MLTable":
        """Apply fn to every row; output schema inferred from the produced rows."""
        return self._apply_rowwise(fn, flat=False)

    def flat_map(self, fn: Callable) -> "MLTable":
        """Apply fn producing zero or more rows per input row, in input order."""
        return self._apply_rowwise(fn, flat=True)

    def _fold(self, rows, fn, schema, where):
        it = iter(rows)
        acc = next(it)
        for row in it:
            try:
                merged = fn(acc, row)
            except Exception as e:
                raise UserFunctionError(f"reduce function failed in {where}: {e}") from e
            acc = merged if isinstance(merged, MLRow) else MLRow(merged)
            schema.conform(acc, where=f"reduce output in {where}")
            if any(v is EMPTY for v in acc):
                raise SchemaError(f"reduce produced an Empty cell in {where}")
        return acc

    def reduce(self, fn: Callable) -> MLRow:
        """Fold all rows with an associative, commutative fn into a single row.

        Folds each partition, then folds the partials in partition order, so
        exactly-associative reductions are partitioning-independent.
        """
        if self.num_rows == 0:
            raise EmptyTableError("reduce of an empty table")
        for i, row in enumerate(self.rows()):
            if any(v is EMPTY for v in row):
                raise SchemaError(f"reduce over Empty cell in row {i}")
        partials = [self._fold(p, fn, self._schema, f"partition {i}")
                    for i, p in enumerate(self._partitions) if p]
        return self._fold(partials, fn, self._schema, "partial combination")

    def reduce_by_key(self, key_col, fn: Callable) -> "MLTable":
        """Group by a key column, reduce each group's non-key cells with fn.

        Output rows are (key, reduced values...), sorted by key.
        """
        if self.num_rows == 0:
            raise EmptyTableError("reduce_by_key of an empty table")
        k = self._resolve_column(key_col)
        rest = [j for j in range(self.num_cols) if j != k]
        sub_schema = Schema(zip((self._schema.names[j] for j in rest),
                                (self._schema.kinds[j] for j in rest)))
        groups: dict = {}
        for i, row in enumerate(self.rows()):
            key = row[k]
            if key is EMPTY:
                raise SchemaError(f"Empty key cell in row {i}")
            sub = MLRow(tuple(row[j] for j in rest))
            if any(v is EMPTY for v in sub):
                raise SchemaError(f"reduce over Empty cell in row {i}")
            groups.setdefault(key, []).append(sub)
        out_rows = []
        for key in sorted(groups):
            reduced = groups[key][0] if len(groups[key]) == 1 else self._fold(
                groups[key], fn, sub_schema, f"key {key!r}")
            out_rows.append(MLRow((key,) + tuple(reduced)))
        schema = Schema([(self._schema.names[k], self._schema.kinds[k])]
                        + list(zip(sub_schema.names, sub_schema.kinds)))
        return MLTable(schema, [out_rows], _validate=False)

    def matrix_batch_map(self, fn: Callable) -> "MLNumericTable":
        raise UnsupportedError("matrix_batch_map requires an MLNumericTable")

    # ------------------------------------------------------------------
    # conversion

    def to_numeric(self) -> "MLNumericTable":
        """Cast to an all-Scalar table; Int widens, Bool/Str/Empty are errors."""
        for j, kind in enumerate(self._schema.kinds):
            if kind not in (ValueKind.SCALAR, ValueKind.INT):
                name = self._schema.names[j]
                label = f"{j} ({name})" if name else str(j)
                raise CastError(f"column {label} has kind {kind.value}, expected numeric")
        arrays, i = [], 0
        for part in self._partitions:
            arr = np.empty((len(part), self.num_cols))
            for r, row in enumerate(part):
                for j, value in enumerate(row):
                    if value is EMPTY:
                        raise CastError(f"Empty cell at row {i}, column {j}")
                    arr[r, j] = float(value)
                i += 1
            arrays.append(arr)
        return MLNumericTable._from_partition_arrays(arrays, self._schema.names)


class MLNumericTable(MLTable):
    """MLTable whose columns are all Scalar; partitions are float64 arrays.

    Row i is the feature vector x_i; the table holds X as one (rows, d)
    array per partition, materializing MLRow tuples only when the generic
    row-wise operations ask for them.
    """

    def __init__(self, schema, partitions, _validate=True):  # pragma: no cover
        raise TypeError("use MLNumericTable.from_array or MLTable.to_numeric")

    @classmethod
    def _from_partition_arrays(cls, arrays, names=None) -> "MLNumericTable":
        if not arrays:
            raise SchemaError("a numeric table needs at least one partition array")
        width = arrays[0].shape[1]
        fixed = []
        for arr in arrays:
            arr = np.ascontiguousarray(arr, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] != width:
                raise SchemaError(f"partition array shape {arr.shape}, expected (*, {width})")
            arr.setflags(write=False)
            fixed.append(arr)
        if names is None:
            names = [None] * width
        t = object.__new__(cls)
        t._schema = Schema(zip(names, [ValueKind.SCALAR] * width))
        t._arrays = tuple(fixed)
        return t

    @classmethod
    def from_array(cls, values, names=None,
                   num_partitions: Optional[int] = None) -> "MLNumericTable":
        """Numeric table from a 2-D array, rows split evenly into partitions."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2:
            raise SchemaError(f"expected a 2-D array, got ndim={arr.ndim}")
        if num_partitions is None:
            num_partitions = _default_partitions()
        return cls._from_partition_arrays(
            np.array_split(arr, num_partitions, axis=0), names)

    # numeric-specific accessors -----------------------------------------

    @property
    def _partitions(self) -> tuple:
        # inherited row-wise operations see materialized rows
        return tuple(tuple(MLRow(row.tolist()) for row in arr) for arr in self._arrays)

    @property
    def num_partitions(self) -> int:
        return len(self._arrays)

    @property
    def num_rows(self) -> int:
        return sum(arr.shape[0] for arr in self._arrays)

    def partition_arrays(self) -> tuple:
        """The underlying per-partition float64 arrays (read-only views)."""
        return self._arrays

    def to_matrix(self) -> np.ndarray:
        return np.vstack([a for a in self._arrays]) if self._arrays else np.zeros((0, 0))

    def repartition(self, num_partitions: int) -> "MLNumericTable":
        return MLNumericTable.from_array(self.to_matrix(), names=self._schema.names,
                                         num_partitions=num_partitions)

    def matrix_batch_map(self, fn: Callable) -> "MLNumericTable":
        """Run fn on each partition as a dense LocalMatrix; concatenate outputs.

        fn must return LocalMatrix values with one fixed column count.
        """
        from . import engine
        from .localmatrix import LocalMatrix

        def task(arr, _fn=fn):
            out = _fn(LocalMatrix.dense(arr))
            if not isinstance(out, LocalMatrix):
                raise UserFunctionError(
                    f"matrix_batch_map function returned {type(out).__name__}, "
                    f"expected LocalMatrix")
            return out.to_array()

        outputs = engine.map_partitions(list(self._arrays), task)
        widths = {o.shape[1] for o in outputs}
        if len(widths) > 1:
            raise SchemaError(f"partition outputs disagree on column count: {sorted(widths)}")
        names = self._schema.names if widths == {self.num_cols} else None
        return MLNumericTable._from_partition_arrays(list(outputs), names)
