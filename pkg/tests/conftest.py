"""Shared test helpers: random table builders and independent oracles."""

import numpy as np

from parml import EMPTY, MLTable, Schema, ValueKind

KINDS = (ValueKind.STR, ValueKind.INT, ValueKind.BOOL, ValueKind.SCALAR)


def random_value(rng, kind, allow_empty=True):
    if allow_empty and rng.random() < 0.1:
        return EMPTY
    if kind is ValueKind.STR:
        return "".join(rng.choice(list("abcde"), size=rng.integers(1, 4)))
    if kind is ValueKind.INT:
        return int(rng.integers(-5, 6))
    if kind is ValueKind.BOOL:
        return bool(rng.integers(0, 2))
    return float(np.round(rng.normal(), 3))


def random_table(rng, max_rows=200, max_cols=6, allow_empty=True, kinds=None,
                 named=True):
    """A random table plus its plain-tuple row list for oracle comparison."""
    if kinds is None:
        n_cols = int(rng.integers(1, max_cols + 1))
        kinds = [KINDS[int(rng.integers(0, len(KINDS)))] for _ in range(n_cols)]
    else:
        n_cols = len(kinds)
    names = [f"col{j}" if named and rng.random() < 0.7 else None for j in range(n_cols)]
    schema = Schema(zip(names, kinds))
    n_rows = int(rng.integers(0, max_rows + 1))
    rows = [tuple(random_value(rng, k, allow_empty) for k in kinds) for _ in range(n_rows)]
    parts = int(rng.integers(1, 5))
    if n_rows == 0:
        return MLTable.empty(schema, num_partitions=parts), rows
    return MLTable.from_rows(rows, schema=schema, num_partitions=parts), rows


# ---------------------------------------------------------------------------
# nested-loop reference implementations, deliberately naive


def oracle_project(rows, cols):
    return [tuple(r[j] for j in cols) for r in rows]


def oracle_filter(rows, pred):
    return [r for r in rows if pred(r)]


def oracle_join(a_rows, b_rows, keys, b_width):
    keep_b = [j for j in range(b_width) if j not in keys]
    out = []
    for ra in a_rows:
        if any(ra[k] is EMPTY for k in keys):
            continue
        for rb in b_rows:
            if any(rb[k] is EMPTY for k in keys):
                continue
            if all(ra[k] == rb[k] for k in keys):
                out.append(tuple(ra) + tuple(rb[j] for j in keep_b))
    return out


def oracle_reduce(rows, fn):
    acc = rows[0]
    for r in rows[1:]:
        acc = tuple(fn(acc, r))
    return acc


def oracle_reduce_by_key(rows, key_col, fn):
    groups = {}
    for r in rows:
        rest = tuple(v for j, v in enumerate(r) if j != key_col)
        groups.setdefault(r[key_col], []).append(rest)
    out = []
    for key in sorted(groups):
        acc = groups[key][0]
        for r in groups[key][1:]:
            acc = tuple(fn(acc, r))
        out.append((key,) + acc)
    return out


def as_multiset(rows):
    out = {}
    for r in rows:
        key = tuple((v is EMPTY, None if v is EMPTY else v) for v in r)
        out[key] = out.get(key, 0) + 1
    return out


def spd_matrix(rng, n):
    """Random symmetric positive definite matrix, comfortably conditioned."""
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def assert_csr_canonical(m):
    indptr, indices, data = m.csr_parts()
    rows, cols = m.shape
    assert indptr.shape == (rows + 1,)
    assert indptr[0] == 0 and indptr[-1] == len(data) == len(indices)
    assert np.all(np.diff(indptr) >= 0)
    assert np.all(data != 0.0)
    for i in range(rows):
        seg = indices[indptr[i]:indptr[i + 1]]
        assert np.all(np.diff(seg) > 0), f"row {i} indices not strictly increasing"
        if len(seg):
            assert 0 <= seg.min() and seg.max() < cols
