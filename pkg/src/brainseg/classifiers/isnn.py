"""Incremental prototype classifier: per-sample pull-or-append training."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..errors import InvalidConfig
from ..rng import Xoshiro256PP
from .base import iter_chunks


class IsnnClassifier(BaseEstimator, ClassifierMixin):
    """Nearest-prototype classifier grown incrementally from the sample stream.

    One prototype node per class is seeded from the first sample of each class
    in row order. Then, for each epoch and each sample x with label c in row
    order: the nearest node w (squared Euclidean; ties to the lowest insertion
    index) is pulled toward x by ``w + mu * (x - w)`` when its class matches,
    otherwise a new node (x, c) is appended. Nodes are never removed, so the
    node count is bounded by n_classes + epochs * n_rows. Prediction returns
    the nearest node's class, ties again to the lowest insertion index.

    Parameters
    ----------
    mu : float, default 0.1
        Pull rate, in (0, 1).
    epochs : int, default 1
        Full passes over the training rows.
    shuffle_seed : int or None, default None
        None trains in the given row order; an integer applies one seeded
        Fisher-Yates permutation of the rows before training.
    """

    def __init__(self, mu: float = 0.1, epochs: int = 1, shuffle_seed=None):
        self.mu = mu
        self.epochs = epochs
        self.shuffle_seed = shuffle_seed

    def fit(self, X, y):
        if not 0.0 < self.mu < 1.0:
            raise InvalidConfig(f"mu must be in (0, 1), got {self.mu}")
        if self.epochs < 1:
            raise InvalidConfig(f"epochs must be >= 1, got {self.epochs}")
        X, y = check_X_y(X, y)
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if self.shuffle_seed is not None:
            rng = Xoshiro256PP(self.shuffle_seed)
            order = rng.partial_shuffle(list(range(X.shape[0])), X.shape[0])
            X, y = X[order], y[order]
        self.classes_ = np.unique(y)

        capacity = len(self.classes_) + self.epochs * X.shape[0]
        nodes = np.empty((capacity, X.shape[1]), dtype=np.float64)
        node_classes = np.empty(capacity, dtype=y.dtype)
        count = 0
        seen = set()
        for row, c in enumerate(y):  # initial node per class, row order
            if c not in seen:
                seen.add(c)
                nodes[count] = X[row]
                node_classes[count] = c
                count += 1

        mu = self.mu
        for _ in range(self.epochs):
            for row in range(X.shape[0]):
                x = X[row]
                diff = nodes[:count] - x
                nearest = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
                if node_classes[nearest] == y[row]:
                    w = nodes[nearest]
                    nodes[nearest] = w + mu * (x - w)
                else:
                    nodes[count] = x
                    node_classes[count] = y[row]
                    count += 1

        self.nodes_ = nodes[:count].copy()
        self.node_classes_ = node_classes[:count].copy()
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "nodes_")
        X = check_array(X, dtype=np.float64)
        pred = np.empty(X.shape[0], dtype=self.node_classes_.dtype)
        for sl in iter_chunks(X.shape[0]):
            block = X[sl]
            d = (
                np.einsum("ij,ij->i", block, block)[:, None]
                - 2.0 * block @ self.nodes_.T
                + np.einsum("ij,ij->i", self.nodes_, self.nodes_)[None, :]
            )
            pred[sl] = self.node_classes_[np.argmin(d, axis=1)]
        return pred
