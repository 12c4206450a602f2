"""Per-tissue confusion counts and precision/recall/F-measure.

Degenerate cases follow fixed conventions so every score is always defined:
precision := 0 when tp + fp == 0 but fn > 0; recall := 0 when tp + fn == 0 but
fp > 0; F := 0 when precision + recall == 0; and when tp == fp == fn == 0 the
tissue is correctly absent and scores are 1. ``TissueScore.degenerate`` is True
whenever any of these conventions fired (some denominator was zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OutOfRangeLabel
from .tissue import Tissue


@dataclass
class TissueScore:
    tissue: Tissue
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_measure: float
    degenerate: bool


def confusion_counts(predicted: np.ndarray, truth: np.ndarray,
                     tissue: Tissue) -> tuple[int, int, int]:
    """(tp, fp, fn) of one tissue over two label maps of equal shape."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise DimensionMismatch(
            f"predicted {predicted.shape} vs truth {truth.shape}"
        )
    for name, arr in (("predicted", predicted), ("truth", truth)):
        if arr.size and (arr.min() < 0 or arr.max() > int(max(Tissue))):
            raise OutOfRangeLabel(f"{name} map contains labels outside 0-4")
    pred_t = predicted == int(tissue)
    truth_t = truth == int(tissue)
    tp = int(np.count_nonzero(pred_t & truth_t))
    fp = int(np.count_nonzero(pred_t & ~truth_t))
    fn = int(np.count_nonzero(~pred_t & truth_t))
    return tp, fp, fn


def precision_recall_f(tp: int, fp: int, fn: int) -> tuple[float, float, float, bool]:
    """(precision, recall, F, degenerate flag) under the documented conventions."""
    degenerate = (tp + fp == 0) or (tp + fn == 0)
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0, 1.0, 1.0, True
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0, True
    f = 2.0 * precision * recall / (precision + recall)
    return precision, recall, f, degenerate


def score_tissue(predicted: np.ndarray, truth: np.ndarray, tissue: Tissue) -> TissueScore:
    tp, fp, fn = confusion_counts(predicted, truth, tissue)
    precision, recall, f, degenerate = precision_recall_f(tp, fp, fn)
    return TissueScore(tissue, tp, fp, fn, precision, recall, f, degenerate)


def score_segmentation(predicted: np.ndarray, truth: np.ndarray) -> dict[Tissue, TissueScore]:
    """TissueScore for all five tissues."""
    return {tissue: score_tissue(predicted, truth, tissue) for tissue in Tissue}
