"""The four tissue classifiers behind one fit/predict interface."""

from __future__ import annotations

import numpy as np

from ..errors import BrainsegError, DimensionMismatch, InvalidConfig, SegmentationError
from ..gabor import FEATURE_DIM, FeatureScaler
from .isnn import IsnnClassifier
from .knn import KnnClassifier
from .pnn import PnnClassifier
from .svm import SvmClassifier

CLASSIFIER_KINDS = ("pnn", "knn", "isnn", "svm")

_REGISTRY = {
    "pnn": PnnClassifier,
    "knn": KnnClassifier,
    "isnn": IsnnClassifier,
    "svm": SvmClassifier,
}

_SEGMENT_CHUNK = 4096


def make_classifier(kind: str, **params):
    """Instantiate a classifier by kind name ('pnn', 'knn', 'isnn', 'svm')."""
    try:
        cls = _REGISTRY[kind]
    except KeyError:
        raise InvalidConfig(
            f"unknown classifier kind {kind!r}; expected one of {CLASSIFIER_KINDS}"
        ) from None
    return cls(**params)


def segment_image(grid: np.ndarray, scaler: FeatureScaler, classifier) -> np.ndarray:
    """Predict a tissue label for every pixel of a feature grid.

    The grid is normalized with the training-time scaler and predicted in
    chunks; predictor failures are re-raised with the affected pixel range.
    Returns a uint8 label map with the grid's spatial shape.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 3 or grid.shape[2] != FEATURE_DIM:
        raise DimensionMismatch(
            f"feature grid must be (h, w, {FEATURE_DIM}), got {grid.shape}"
        )
    h, w = grid.shape[:2]
    flat = scaler.transform(grid.reshape(-1, FEATURE_DIM))
    out = np.empty(h * w, dtype=np.uint8)
    for start in range(0, flat.shape[0], _SEGMENT_CHUNK):
        end = min(start + _SEGMENT_CHUNK, flat.shape[0])
        try:
            out[start:end] = classifier.predict(flat[start:end])
        except BrainsegError:
            raise
        except Exception as exc:
            y0, y1 = start // w, (end - 1) // w
            raise SegmentationError(
                f"prediction failed for pixels {start}..{end - 1} "
                f"(rows {y0}..{y1}): {exc}"
            ) from exc
    return out.reshape(h, w)


__all__ = [
    "CLASSIFIER_KINDS",
    "IsnnClassifier",
    "KnnClassifier",
    "PnnClassifier",
    "SvmClassifier",
    "make_classifier",
    "segment_image",
]
