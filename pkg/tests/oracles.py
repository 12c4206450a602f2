"""Independent reference implementations used to cross-check the package.

Each oracle recomputes a contract by a different route than the package code
(plain Python loops, exact rational arithmetic, exhaustive enumeration), so
agreement between the two is evidence of correctness rather than of a shared
bug. Nothing here imports from brainseg.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# PRNG reference: splitmix64 expansion + xoshiro256++ core, written from the
# published algorithm with explicit modular arithmetic.


def splitmix64_next(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class XoshiroReference:
    def __init__(self, seed: int):
        state = seed & _MASK64
        self.s = []
        for _ in range(4):
            state, word = splitmix64_next(state)
            self.s.append(word)

    @staticmethod
    def _rotl(x: int, k: int) -> int:
        return ((x << k) & _MASK64) | (x >> (64 - k))

    def next_u64(self) -> int:
        s = self.s
        out = (self._rotl((s[0] + s[3]) & _MASK64, 23) + s[0]) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return out

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


# ---------------------------------------------------------------------------
# Gabor reference: direct per-coefficient kernel construction.


def gabor_kernels_reference(frequency: float, orientation_rad: float,
                            sigma: float, radius: int,
                            gamma: float) -> tuple[np.ndarray, np.ndarray]:
    size = 2 * radius + 1
    real = np.empty((size, size))
    imag = np.empty((size, size))
    for row in range(size):
        for col in range(size):
            y = row - radius
            x = col - radius
            xr = x * math.cos(orientation_rad) + y * math.sin(orientation_rad)
            yr = -x * math.sin(orientation_rad) + y * math.cos(orientation_rad)
            env = math.exp(-(xr * xr + (gamma * yr) ** 2) / (2.0 * sigma * sigma))
            real[row, col] = env * math.cos(2.0 * math.pi * frequency * xr)
            imag[row, col] = env * math.sin(2.0 * math.pi * frequency * xr)
    real = real - real.mean()
    real = real / math.sqrt(float((real * real).sum()))
    imag = imag / math.sqrt(float((imag * imag).sum()))
    return real, imag


def correlate_at_reference(image: np.ndarray, kernel: np.ndarray,
                           row: int, col: int) -> float:
    """Correlation at one pixel with clamp-to-edge borders, plain loops."""
    h, w = image.shape
    radius = kernel.shape[0] // 2
    total = 0.0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            y = min(max(row + dy, 0), h - 1)
            x = min(max(col + dx, 0), w - 1)
            total += float(image[y, x]) * kernel[dy + radius, dx + radius]
    return total


# ---------------------------------------------------------------------------
# Classifier references.


def pnn_density_reference(patterns: np.ndarray, sigma: float, x: np.ndarray) -> float:
    patterns = np.asarray(patterns, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    n = patterns.shape[1]
    norm = (2.0 * math.pi) ** (-n / 2.0) * sigma ** (-n)
    acc = 0.0
    for row in patterns:
        d2 = float(((x - row) ** 2).sum())
        acc += math.exp(-d2 / (2.0 * sigma * sigma))
    return norm * acc / patterns.shape[0]


def pnn_predict_reference(X: np.ndarray, y: np.ndarray, sigma: float,
                          priors, costs, query: np.ndarray) -> int:
    """Argmax of prior*cost-weighted class densities; ties go to the lowest
    class code; all-zero densities fall back to the nearest stored pattern."""
    classes = sorted(set(int(c) for c in y))
    if priors is None:
        priors = [1.0 / len(classes)] * len(classes)
    if costs is None:
        costs = [1.0] * len(classes)
    best_class, best_score = None, None
    for j, c in enumerate(classes):
        pats = X[np.asarray(y) == c]
        score = priors[j] * costs[j] * pnn_density_reference(pats, sigma, query)
        if best_score is None or score > best_score:
            best_class, best_score = c, score
    if best_score == 0.0:
        d2 = [float(((query - row) ** 2).sum()) for row in np.asarray(X)]
        return int(y[min(range(len(d2)), key=lambda i: (d2[i], i))])
    return best_class


def knn_predict_reference(X: np.ndarray, y: np.ndarray, query: np.ndarray, k: int):
    """Exhaustive scan with the documented tie rules."""
    d2 = [float(((query - row) ** 2).sum()) for row in X]
    order = sorted(range(len(X)), key=lambda i: (d2[i], i))[:k]
    votes = {}
    nearest = {}
    for i in order:
        c = int(y[i])
        votes[c] = votes.get(c, 0) + 1
        if c not in nearest:
            nearest[c] = d2[i]
    top = max(votes.values())
    tied = sorted(c for c, v in votes.items() if v == top)
    best = tied[0]
    for c in tied[1:]:
        if nearest[c] < nearest[best]:
            best = c
    return best


def nearest_label_reference(points: np.ndarray, labels, query: np.ndarray):
    """Nearest row's label; distance ties go to the lowest row index."""
    best_i, best_d = 0, float(((query - points[0]) ** 2).sum())
    for i in range(1, len(points)):
        d = float(((query - points[i]) ** 2).sum())
        if d < best_d:
            best_i, best_d = i, d
    return labels[best_i]


# ---------------------------------------------------------------------------
# Exact metric reference in rational arithmetic.


def confusion_reference(pred, truth, tissue: int) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for p, t in zip(np.asarray(pred).ravel(), np.asarray(truth).ravel()):
        if p == tissue and t == tissue:
            tp += 1
        elif p == tissue:
            fp += 1
        elif t == tissue:
            fn += 1
    return tp, fp, fn


def prf_fraction_reference(tp: int, fp: int, fn: int):
    """(precision, recall, F) as Fractions under the documented conventions."""
    if tp == 0 and fp == 0 and fn == 0:
        return Fraction(1), Fraction(1), Fraction(1)
    precision = Fraction(tp, tp + fp) if tp + fp > 0 else Fraction(0)
    recall = Fraction(tp, tp + fn) if tp + fn > 0 else Fraction(0)
    if precision + recall == 0:
        return precision, recall, Fraction(0)
    f = 2 * precision * recall / (precision + recall)
    return precision, recall, f


# ---------------------------------------------------------------------------
# SVM dual reference: exact active-set enumeration for small problems.
#
# Maximize W(a) = sum(a) - 0.5 a' Q a with Q = (y y') * K, subject to
# y'a = 0 and 0 <= a <= C, by enumerating every {lower, upper, free}
# assignment, solving the equality-constrained stationarity system on the
# free set, and keeping the best feasible candidate.


def svm_dual_max_reference(K: np.ndarray, y: np.ndarray, C: float) -> float:
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    Q = np.outer(y, y) * K
    best = 0.0  # alpha = 0 is always feasible
    for pattern in product((0, 1, 2), repeat=n):
        lower = [i for i in range(n) if pattern[i] == 0]
        upper = [i for i in range(n) if pattern[i] == 1]
        free = [i for i in range(n) if pattern[i] == 2]
        alpha = np.zeros(n)
        alpha[upper] = C
        if free:
            m = len(free)
            rhs = np.ones(m) - Q[np.ix_(free, upper)].sum(axis=1) * C
            system = np.zeros((m + 1, m + 1))
            system[:m, :m] = Q[np.ix_(free, free)]
            system[:m, m] = y[free]
            system[m, :m] = y[free]
            target = np.concatenate([rhs, [-float(y[upper].sum()) * C]])
            sol, *_ = np.linalg.lstsq(system, target, rcond=None)
            if not np.allclose(system @ sol, target, atol=1e-8):
                continue  # no stationary point with this support
            alpha[free] = sol[:m]
        if np.any(alpha < -1e-9) or np.any(alpha > C + 1e-9):
            continue
        if abs(float(alpha @ y)) > 1e-8:
            continue
        alpha = np.clip(alpha, 0.0, C)
        value = float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
        if value > best:
            best = value
    return best


def rbf_kernel_reference(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            out[i, j] = math.exp(-gamma * float(((a - b) ** 2).sum()))
    return out
