"""Text featurization: word n-grams and tf-idf weighting."""

from __future__ import annotations

import re
from typing import Optional, Sequence

import numpy as np

from ..errors import EmptyTableError
from ..mltable import MLNumericTable

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")


def n_grams(text: str, n: int) -> list:
    """Lowercase word-level n-grams, space-joined.

    Tokens are maximal alphanumeric runs of the lowercased text; fewer than
    n tokens yields an empty list.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tokens = [t for t in _TOKEN_SPLIT.split(text.lower()) if t]
    return [" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def tf_idf(docs: Sequence[Sequence[str]],
           num_partitions: Optional[int] = None) -> tuple:
    """Weight token-sequence documents as raw count times ln(N / df).

    Returns (table, vocabulary): the vocabulary is the sorted distinct terms,
    the table has one column per term in vocabulary order (columns are named
    by their terms) and one row per document.
    """
    docs = list(docs)
    if not docs:
        raise EmptyTableError("tf_idf of an empty corpus")
    vocab = sorted({term for doc in docs for term in doc})
    if not vocab:
        raise EmptyTableError("tf_idf of a corpus with no terms")
    col = {term: j for j, term in enumerate(vocab)}
    n_docs = len(docs)

    counts = np.zeros((n_docs, len(vocab)))
    for i, doc in enumerate(docs):
        for term in doc:
            counts[i, col[term]] += 1.0
    df = np.count_nonzero(counts, axis=0)
    idf = np.log(n_docs / df)
    table = MLNumericTable.from_array(counts * idf, names=vocab,
                                      num_partitions=num_partitions)
    return table, vocab
