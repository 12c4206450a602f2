"""Probabilistic neural network: Parzen-window class densities, argmax decision."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..errors import InvalidConfig, UnknownClass
from .base import iter_chunks

_TWO_PI = 2.0 * np.pi


class PnnClassifier(BaseEstimator, ClassifierMixin):
    """Parzen-window density classifier with an isotropic Gaussian kernel.

    For class A with m_A stored patterns x_Ai, the estimated density at x is

        f_A(x) = (2 pi)^(-n/2) sigma^(-n) * (1/m_A) * sum_i exp(-|x - x_Ai|^2 / (2 sigma^2))

    where n is the feature dimension. Prediction maximizes
    prior_A * cost_A * f_A(x); exact score ties go to the lowest class code.
    If every class density underflows to zero, the query falls back to the
    class of the nearest stored pattern (ties by lowest stored row index).

    Parameters
    ----------
    sigma : float, default 0.5
        Kernel bandwidth (> 0).
    priors : sequence of float or None, default None
        Class prior weights aligned with the sorted class codes seen in fit;
        None means uniform. Must sum to 1.
    costs : sequence of float or None, default None
        Positive misclassification cost per class, same alignment; None means 1.
    """

    def __init__(self, sigma: float = 0.5, priors=None, costs=None):
        self.sigma = sigma
        self.priors = priors
        self.costs = costs

    def fit(self, X, y):
        if self.sigma <= 0:
            raise InvalidConfig(f"sigma must be > 0, got {self.sigma}")
        X, y = check_X_y(X, y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        self.X_ = np.asarray(X, dtype=np.float64)
        self.y_idx_ = y_idx
        self.class_counts_ = np.bincount(y_idx, minlength=len(self.classes_))
        n_classes = len(self.classes_)
        if self.priors is None:
            self.priors_ = np.full(n_classes, 1.0 / n_classes)
        else:
            self.priors_ = np.asarray(self.priors, dtype=np.float64)
            if self.priors_.shape != (n_classes,):
                raise InvalidConfig(
                    f"priors must have one entry per class ({n_classes})"
                )
            if abs(self.priors_.sum() - 1.0) > 1e-9 or np.any(self.priors_ < 0):
                raise InvalidConfig("priors must be non-negative and sum to 1")
        if self.costs is None:
            self.costs_ = np.ones(n_classes)
        else:
            self.costs_ = np.asarray(self.costs, dtype=np.float64)
            if self.costs_.shape != (n_classes,):
                raise InvalidConfig(f"costs must have one entry per class ({n_classes})")
            if np.any(self.costs_ <= 0):
                raise InvalidConfig("costs must be positive")
        return self

    def class_pdfs(self, X) -> np.ndarray:
        """Density estimate per class, shape (n_queries, n_classes)."""
        check_is_fitted(self, "X_")
        X = check_array(X, dtype=np.float64)
        n_dim = self.X_.shape[1]
        norm = _TWO_PI ** (-n_dim / 2.0) * self.sigma ** (-n_dim)
        out = np.empty((X.shape[0], len(self.classes_)))
        for sl in iter_chunks(X.shape[0]):
            kernels = np.exp(
                cdist(X[sl], self.X_, "sqeuclidean") / (-2.0 * self.sigma**2)
            )
            for ci in range(len(self.classes_)):
                member = self.y_idx_ == ci
                out[sl, ci] = norm * kernels[:, member].sum(axis=1) / self.class_counts_[ci]
        return out

    def class_pdf(self, X, class_code) -> np.ndarray:
        """Density estimate for one class code."""
        check_is_fitted(self, "X_")
        matches = np.flatnonzero(self.classes_ == class_code)
        if matches.size == 0:
            raise UnknownClass(f"class {class_code!r} not present at fit time")
        return self.class_pdfs(X)[:, matches[0]]

    def decision_scores(self, X) -> np.ndarray:
        """prior * cost * density per class, shape (n_queries, n_classes)."""
        return self.class_pdfs(X) * (self.priors_ * self.costs_)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "X_")
        X = check_array(X, dtype=np.float64)
        scores = self.decision_scores(X)
        pred = self.classes_[np.argmax(scores, axis=1)]
        dead = ~np.any(scores > 0, axis=1)
        if np.any(dead):
            # Underflow fallback: nearest stored pattern, lowest row index on ties.
            d = cdist(X[dead], self.X_, "sqeuclidean")
            pred[dead] = self.classes_[self.y_idx_[np.argmin(d, axis=1)]]
        return pred
