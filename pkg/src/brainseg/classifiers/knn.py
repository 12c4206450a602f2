"""k-nearest-neighbor classifier with fully specified tie handling."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..errors import InvalidK
from .base import iter_chunks


class KnnClassifier(BaseEstimator, ClassifierMixin):
    """Majority vote over the k nearest training rows (Euclidean distance).

    Tie handling is deterministic: equal distances at rank k are resolved by
    lower training-row index (stable sort); vote ties go to the tied class
    whose nearest voting member is closest, then to the lowest class code.
    """

    def __init__(self, k: int = 5):
        self.k = k

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if not 1 <= self.k <= X.shape[0]:
            raise InvalidK(f"k={self.k} outside [1, {X.shape[0]}]")
        self.X_ = np.asarray(X, dtype=np.float64)
        self.y_ = np.asarray(y)
        self.classes_ = np.unique(y)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "X_")
        X = check_array(X, dtype=np.float64)
        n_classes = len(self.classes_)
        class_index = {c: i for i, c in enumerate(self.classes_)}
        y_idx = np.array([class_index[c] for c in self.y_])
        pred = np.empty(X.shape[0], dtype=self.classes_.dtype)
        for sl in iter_chunks(X.shape[0]):
            d = cdist(X[sl], self.X_, "sqeuclidean")
            order = np.argsort(d, axis=1, kind="stable")[:, : self.k]
            neigh_classes = y_idx[order]
            counts = np.zeros((order.shape[0], n_classes), dtype=np.int64)
            rows = np.repeat(np.arange(order.shape[0]), self.k)
            np.add.at(counts, (rows, neigh_classes.ravel()), 1)
            top = counts.max(axis=1)
            winners = counts == top[:, None]
            pred_idx = np.argmax(winners, axis=1)  # lowest code among winners
            multi = winners.sum(axis=1) > 1
            for row in np.flatnonzero(multi):
                tied = np.flatnonzero(winners[row])
                best_class, best_dist = None, None
                for ci in tied:  # ascending class code
                    hits = np.flatnonzero(neigh_classes[row] == ci)
                    nearest = d[row, order[row, hits[0]]]
                    if best_dist is None or nearest < best_dist:
                        best_class, best_dist = ci, nearest
                pred_idx[row] = best_class
            pred[sl] = self.classes_[pred_idx]
        return pred
