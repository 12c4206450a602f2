"""Shared helpers for the classifier estimators."""

from __future__ import annotations

from typing import Iterator

# Rows processed per block in chunked predictors; bounds the size of pairwise
# distance matrices (chunk x training rows) regardless of query count.
CHUNK_ROWS = 4096


def iter_chunks(n: int, size: int = CHUNK_ROWS) -> Iterator[slice]:
    """Yield slices covering range(n) in blocks of ``size``."""
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))
