"""Balanced sampling of labeled training pixels from feature grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientPixels
from .rng import Xoshiro256PP
from .tissue import TISSUE_NAMES, Tissue


@dataclass
class TrainingSet:
    """Feature rows with labels and per-row (image id, x, y) provenance."""

    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64 tissue codes
    sources: list[tuple[str, int, int]]  # (image id, x, y) per row

    def __len__(self) -> int:
        return len(self.labels)

    @staticmethod
    def concat(parts: list["TrainingSet"]) -> "TrainingSet":
        return TrainingSet(
            features=np.concatenate([p.features for p in parts], axis=0),
            labels=np.concatenate([p.labels for p in parts], axis=0),
            sources=[s for p in parts for s in p.sources],
        )


def sample_training_points(
    grid: np.ndarray,
    labels: np.ndarray,
    per_class: int,
    seed: int,
    image_id: str = "",
) -> TrainingSet:
    """Sample ``per_class`` pixels per tissue, uniformly without replacement.

    Rows are ordered tissue code 0..4, selection order within each tissue. One
    PRNG stream seeded with ``seed`` serves all five tissues, consumed in
    tissue-code order (partial Fisher-Yates over the tissue's pixel indices in
    row-major order).
    """
    grid = np.asarray(grid, dtype=np.float64)
    labels = np.asarray(labels)
    if grid.ndim != 3:
        raise DimensionMismatch(f"feature grid must be (h, w, d), got {grid.shape}")
    if grid.shape[:2] != labels.shape:
        raise DimensionMismatch(
            f"feature grid {grid.shape[:2]} vs label map {labels.shape}"
        )
    if per_class < 1:
        raise InsufficientPixels(f"per_class must be >= 1, got {per_class}")

    width = labels.shape[1]
    flat_labels = labels.ravel()
    rng = Xoshiro256PP(seed)
    rows, row_labels, sources = [], [], []
    for tissue in Tissue:
        candidates = np.flatnonzero(flat_labels == int(tissue))
        if candidates.size < per_class:
            raise InsufficientPixels(
                f"tissue {TISSUE_NAMES[tissue]} has {candidates.size} pixels, "
                f"need {per_class}"
            )
        chosen = rng.partial_shuffle(list(candidates), per_class)
        for flat_idx in chosen:
            y, x = divmod(int(flat_idx), width)
            rows.append(grid[y, x])
            row_labels.append(int(tissue))
            sources.append((image_id, x, y))
    return TrainingSet(
        features=np.array(rows, dtype=np.float64),
        labels=np.array(row_labels, dtype=np.int64),
        sources=sources,
    )
