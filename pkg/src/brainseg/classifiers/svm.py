"""One-vs-one soft-margin SVM trained by sequential minimal optimization."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..errors import ConvergenceWarning, InvalidConfig
from .base import iter_chunks

SUPPORT_ALPHA_MIN = 1e-8  # multipliers at or below this are dropped from the model
_STEP_EPS = 1e-12


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """Soft-margin dual objective sum(a) - 1/2 (a*y)' K (a*y)."""
    v = alpha * y
    return float(alpha.sum() - 0.5 * v @ K @ v)


def kkt_violation(K: np.ndarray, y: np.ndarray, alpha: np.ndarray, b: float,
                  C: float) -> float:
    """Largest KKT violation of a dual solution (0 at exact optimality)."""
    margins = y * ((alpha * y) @ K + b)
    lower = alpha <= SUPPORT_ALPHA_MIN
    upper = alpha >= C - SUPPORT_ALPHA_MIN
    free = ~lower & ~upper
    viol = np.zeros_like(alpha)
    viol[lower] = np.maximum(0.0, 1.0 - margins[lower])
    viol[upper] = np.maximum(0.0, margins[upper] - 1.0)
    viol[free] = np.abs(margins[free] - 1.0)
    return float(viol.max()) if alpha.size else 0.0


def smo_solve(K: np.ndarray, y: np.ndarray, C: float, tol: float,
              max_passes: int) -> tuple[np.ndarray, float, bool, int]:
    """Maximize the soft-margin dual for one binary problem.

    Deterministic variant of Platt's algorithm: the first-choice loop scans
    violating points in ascending index order, the second choice maximizes
    |E1 - E2| over non-bound points (lowest index on ties) with ordered
    fallback scans. Returns (alpha, b, converged, passes). After the loop the
    bias is re-derived from the final alphas whenever the incrementally
    maintained value fails the margin check (it goes stale when the last
    steps leave no free point). ``converged`` is False when KKT violations
    above ``tol`` remain even then — whether ``max_passes`` ran out or no
    candidate step could make progress (degenerate kernel blocks) — in which
    case the best-so-far solution is still returned.
    """
    n = y.size
    alpha = np.zeros(n)
    b = 0.0
    E = -y.astype(np.float64)  # decision function starts at zero

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, E
        if i1 == i2:
            return False
        a1o, a2o = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        E1, E2 = E[i1], E[i2]
        s = y1 * y2
        if s > 0:
            L, H = max(0.0, a1o + a2o - C), min(C, a1o + a2o)
        else:
            L, H = max(0.0, a2o - a1o), min(C, C + a2o - a1o)
        if L >= H:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2 = a2o + y2 * (E1 - E2) / eta
            a2 = min(max(a2, L), H)
        else:
            # Flat or concave direction: evaluate the dual change at both ends.
            def gain(a2_new: float) -> float:
                d2 = a2_new - a2o
                d1 = -s * d2
                g1 = E1 + y1 - b  # sum_j alpha_j y_j K_1j
                g2 = E2 + y2 - b
                return (
                    d1 + d2
                    - d1 * y1 * g1
                    - d2 * y2 * g2
                    - 0.5 * d1 * d1 * k11
                    - 0.5 * d2 * d2 * k22
                    - d1 * d2 * s * k12
                )
            gl, gh = gain(L), gain(H)
            if gl > gh + _STEP_EPS:
                a2 = L
            elif gh > gl + _STEP_EPS:
                a2 = H
            else:
                return False
        if abs(a2 - a2o) < _STEP_EPS * (a2 + a2o + _STEP_EPS):
            return False
        a1 = a1o + s * (a2o - a2)
        if a1 < 0.0:
            a1 = 0.0
        elif a1 > C:
            a1 = C
        d1 = (a1 - a1o) * y1
        d2 = (a2 - a2o) * y2
        b1 = b - E1 - d1 * k11 - d2 * k12
        b2 = b - E2 - d1 * k12 - d2 * k22
        if 0.0 < a1 < C:
            b_new = b1
        elif 0.0 < a2 < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        alpha[i1], alpha[i2] = a1, a2
        E += d1 * K[i1] + d2 * K[i2] + (b_new - b)
        b = b_new
        return True

    def examine(i2: int) -> bool:
        r2 = E[i2] * y[i2]
        if not ((r2 < -tol and alpha[i2] < C) or (r2 > tol and alpha[i2] > 0)):
            return False
        nonbound = np.flatnonzero((alpha > 0) & (alpha < C))
        if nonbound.size > 1:
            i1 = int(nonbound[np.argmax(np.abs(E[nonbound] - E[i2]))])
            if take_step(i1, i2):
                return True
        for i1 in nonbound:
            if take_step(int(i1), i2):
                return True
        for i1 in range(n):
            if take_step(i1, i2):
                return True
        return False

    examine_all = True
    passes = 0
    while passes < max_passes:
        passes += 1
        changed = 0
        if examine_all:
            targets = range(n)
        else:
            targets = np.flatnonzero((alpha > 0) & (alpha < C))
        for i2 in targets:
            if examine(int(i2)):
                changed += 1
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    # Converged means actually optimal to tolerance — a stalled solver (no
    # candidate step can progress on a degenerate kernel block) must not
    # claim convergence just because the examine loop went quiet.
    f_nob = (alpha * y) @ K  # recomputed, free of incremental drift
    lower = alpha <= SUPPORT_ALPHA_MIN
    upper = alpha >= C - SUPPORT_ALPHA_MIN

    def margin_violation(b_val: float) -> float:
        ye = y * (f_nob + b_val) - 1.0
        viol = np.where(lower, np.maximum(0.0, -ye),
                        np.where(upper, np.maximum(0.0, ye), np.abs(ye)))
        return float(viol.max()) if n else 0.0

    worst = margin_violation(b)
    if worst > tol and n:
        # The incremental bias goes stale when the final steps leave no free
        # point, so an optimal alpha can still fail the margin check. Each
        # point's margin condition bounds b on one side (free points pin it);
        # re-pick b from that interval before judging convergence, keeping it
        # only when it actually helps.
        targets = y - f_nob
        free = ~(lower | upper)
        floors = targets[(lower & (y > 0)) | (upper & (y < 0)) | free]
        ceils = targets[(lower & (y < 0)) | (upper & (y > 0)) | free]
        if floors.size and ceils.size:
            candidate = (floors.max() + ceils.min()) / 2.0
        elif floors.size:
            candidate = floors.max()
        elif ceils.size:
            candidate = ceils.min()
        else:
            candidate = b
        candidate_worst = margin_violation(float(candidate))
        if candidate_worst < worst:
            b, worst = float(candidate), candidate_worst
    converged = worst <= tol
    return alpha, b, converged, passes


@dataclass
class PairModel:
    """Trained state of one class pair (lo is the +1 side)."""

    class_lo: int
    class_hi: int
    sv_x: np.ndarray = field(repr=False)
    sv_y: np.ndarray = field(repr=False)
    sv_alpha: np.ndarray = field(repr=False)
    bias: float = 0.0
    converged: bool = True


class SvmClassifier(BaseEstimator, ClassifierMixin):
    """One-vs-one SVM; each pair solved by the from-scratch SMO above.

    For the pair (lo, hi) the lower class code is the +1 side; a query's pair
    decision value is sum_i alpha_i y_i K(sv_i, x) + b and a non-negative value
    votes lo. The predicted class has most votes; vote ties go to the tied
    class with the largest sum of |decision value| over the pairs it won, then
    to the lowest class code.

    Parameters
    ----------
    C : float, default 1.0
        Soft-margin box constraint (> 0).
    kernel : {"rbf", "linear"}, default "rbf"
    gamma : float or None, default None
        RBF width; None uses 1 / n_features.
    tol : float, default 1e-3
        KKT violation tolerance for SMO termination.
    max_passes_factor : int, default 10
        Pass budget per pair = factor * pair size; exhausting it records a
        ConvergenceWarning and keeps the best-so-far pair solution.
    """

    def __init__(self, C: float = 1.0, kernel: str = "rbf", gamma=None,
                 tol: float = 1e-3, max_passes_factor: int = 10):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_passes_factor = max_passes_factor

    def _validate_params(self, n_features: int) -> None:
        if self.C <= 0:
            raise InvalidConfig(f"C must be > 0, got {self.C}")
        if self.kernel not in ("rbf", "linear"):
            raise InvalidConfig(f"kernel must be 'rbf' or 'linear', got {self.kernel!r}")
        if self.gamma is not None and self.gamma <= 0:
            raise InvalidConfig(f"gamma must be > 0, got {self.gamma}")
        if self.tol <= 0:
            raise InvalidConfig(f"tol must be > 0, got {self.tol}")
        self.gamma_ = self.gamma if self.gamma is not None else 1.0 / n_features

    def _kernel(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self.kernel == "linear":
            return A @ B.T
        return np.exp(-self.gamma_ * cdist(A, B, "sqeuclidean"))

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        X = np.asarray(X, dtype=np.float64)
        self._validate_params(X.shape[1])
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise InvalidConfig("SVM training needs at least two classes")
        self.pairs_: list[PairModel] = []
        self.pair_states_: list[dict] = []  # full per-pair state for diagnostics
        failed = []
        for lo, hi in combinations(self.classes_, 2):
            mask = (y == lo) | (y == hi)
            Xp = X[mask]
            yp = np.where(y[mask] == lo, 1.0, -1.0)
            K = self._kernel(Xp, Xp)
            max_passes = self.max_passes_factor * Xp.shape[0]
            alpha, bias, converged, _ = smo_solve(K, yp, self.C, self.tol, max_passes)
            keep = alpha > SUPPORT_ALPHA_MIN
            self.pairs_.append(
                PairModel(int(lo), int(hi), Xp[keep].copy(), yp[keep].copy(),
                          alpha[keep].copy(), float(bias), converged)
            )
            self.pair_states_.append(
                {"classes": (int(lo), int(hi)), "X": Xp, "y": yp,
                 "alpha": alpha, "bias": float(bias), "converged": converged}
            )
            if not converged:
                failed.append((int(lo), int(hi)))
        if failed:
            warnings.warn(
                f"SMO stopped above the KKT tolerance for pairs {failed} "
                "(pass budget exhausted or no step could make progress); "
                "returning best-so-far solutions",
                ConvergenceWarning,
            )
        return self

    def pair_decision(self, pair: PairModel, X: np.ndarray) -> np.ndarray:
        K = self._kernel(X, pair.sv_x)
        return K @ (pair.sv_alpha * pair.sv_y) + pair.bias

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "pairs_")
        X = check_array(X, dtype=np.float64)
        class_index = {int(c): i for i, c in enumerate(self.classes_)}
        pred = np.empty(X.shape[0], dtype=self.classes_.dtype)
        for sl in iter_chunks(X.shape[0]):
            block = X[sl]
            votes = np.zeros((block.shape[0], len(self.classes_)), dtype=np.int64)
            strength = np.zeros_like(votes, dtype=np.float64)
            for pair in self.pairs_:
                d = self.pair_decision(pair, block)
                lo_wins = d >= 0
                lo_i, hi_i = class_index[pair.class_lo], class_index[pair.class_hi]
                votes[lo_wins, lo_i] += 1
                votes[~lo_wins, hi_i] += 1
                strength[lo_wins, lo_i] += np.abs(d[lo_wins])
                strength[~lo_wins, hi_i] += np.abs(d[~lo_wins])
            top = votes.max(axis=1)
            tied = votes == top[:, None]
            # Rank by (vote win, |decision| sum) with lowest code on exact ties.
            masked = np.where(tied, strength, -np.inf)
            pred[sl] = self.classes_[np.argmax(masked, axis=1)]
        return pred
