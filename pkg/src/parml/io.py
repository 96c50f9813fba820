"""File formats: delimited tables, line-per-document corpora, sparse triplets."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

from .errors import EmptyTableError, SchemaError
from .localmatrix import LocalMatrix
from .mltable import EMPTY, MLTable, Schema, ValueKind

_BOOL_LITERALS = {"true": True, "false": False}


def _parse_cell(text: str, kind: ValueKind):
    if text == "":
        return EMPTY
    if kind is ValueKind.BOOL:
        return _BOOL_LITERALS[text]
    if kind is ValueKind.INT:
        return int(text)
    if kind is ValueKind.SCALAR:
        return float(text)
    return text


def _infer_column_kind(cells) -> ValueKind:
    """Kind for one column of raw strings: Bool literals, else Int, Scalar, Str."""
    non_empty = [c for c in cells if c != ""]
    if not non_empty:
        return ValueKind.SCALAR
    if all(c in _BOOL_LITERALS for c in non_empty):
        return ValueKind.BOOL
    for kind, parse in ((ValueKind.INT, int), (ValueKind.SCALAR, float)):
        try:
            for c in non_empty:
                parse(c)
            return kind
        except ValueError:
            continue
    return ValueKind.STR


def read_csv(path, header: bool = True, delimiter: str = ",",
             num_partitions: Optional[int] = None) -> MLTable:
    """Read a delimited file into a table.

    Empty fields become Empty cells. Column kinds are inferred per column:
    `true`/`false` literals give Bool, otherwise Int, then Scalar, then Str.
    """
    path = Path(path)
    with path.open(newline="") as f:
        records = list(csv.reader(f, delimiter=delimiter))
    names = None
    if header:
        if not records:
            raise SchemaError(f"{path}: header requested but file is empty")
        names = records[0]
        records = records[1:]
    if not records:
        raise SchemaError(f"{path}: no data rows to infer a schema from")
    width = len(records[0])
    for i, rec in enumerate(records):
        if len(rec) != width:
            raise SchemaError(f"{path}: row {i} has {len(rec)} fields, expected {width}")
    if names is not None and len(names) != width:
        raise SchemaError(f"{path}: header has {len(names)} fields, rows have {width}")
    kinds = [_infer_column_kind([rec[j] for rec in records]) for j in range(width)]
    schema = Schema(zip(names if names is not None else [None] * width, kinds))
    rows = [tuple(_parse_cell(rec[j], kinds[j]) for j in range(width)) for rec in records]
    return MLTable.from_rows(rows, schema=schema, num_partitions=num_partitions)


def _format_cell(value) -> str:
    if value is EMPTY:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(table: MLTable, path, header: bool = True, delimiter: str = ","):
    """Write a table as a delimited file; Empty cells become empty fields."""
    path = Path(path)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, delimiter=delimiter)
        if header:
            writer.writerow(
                n if n is not None else f"c{j}" for j, n in enumerate(table.schema.names))
        for row in table.rows():
            writer.writerow(_format_cell(v) for v in row)


def read_corpus(path, num_partitions: Optional[int] = None) -> MLTable:
    """One document per line, as a single-Str-column table named 'text'."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise EmptyTableError(f"{path}: corpus is empty")
    schema = Schema([("text", ValueKind.STR)])
    return MLTable.from_rows(((line,) for line in lines), schema=schema,
                             num_partitions=num_partitions)


def read_triplets(path, shape=None) -> LocalMatrix:
    """Sparse matrix from `row col value` lines (0-based indices).

    Shape defaults to the smallest box holding all entries. Exact zeros are
    dropped (canonical CSR).
    """
    path = Path(path)
    rows, cols, vals = [], [], []
    with path.open() as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'row col value', got {line!r}")
            try:
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                vals.append(float(parts[2]))
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
    if shape is None:
        if not rows:
            raise ValueError(f"{path}: no entries and no explicit shape")
        shape = (max(rows) + 1, max(cols) + 1)
    return LocalMatrix.from_triplets(rows, cols, vals, shape)


def write_triplets(matrix: LocalMatrix, path):
    """Write a matrix's nonzero entries as `row col value` lines."""
    path = Path(path)
    with path.open("w") as f:
        for i in range(matrix.num_rows):
            idx, vals = matrix.sparse_row(i)
            for j, v in zip(idx, vals):
                f.write(f"{i} {int(j)} {float(v)!r}\n")
