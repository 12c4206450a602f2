"""Pairwise soft-margin SVM and its sequential minimal optimizer."""

from __future__ import annotations

import warnings

import numpy as np
import pytest

from brainseg.classifiers import SvmClassifier
from brainseg.classifiers.svm import (
    SUPPORT_ALPHA_MIN,
    PairModel,
    dual_objective,
    kkt_violation,
    smo_solve,
)
from brainseg.errors import ConvergenceWarning, InvalidConfig

from oracles import rbf_kernel_reference, svm_dual_max_reference


def _random_binary_problem(seed, n=6, d=2):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = np.ones(n)
    y[: n // 2] = -1.0
    rng.shuffle(y)
    return X, y


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("kernel", ["rbf", "linear"])
def test_smo_reaches_brute_force_dual_optimum(seed, kernel):
    X, y = _random_binary_problem(seed)
    K = rbf_kernel_reference(X, X, 0.5) if kernel == "rbf" else X @ X.T
    C = 1.5
    alpha, b, converged, _ = smo_solve(K, y, C, tol=1e-8, max_passes=5000)
    assert converged
    best = svm_dual_max_reference(K, y, C)
    got = dual_objective(K, y, alpha)
    assert got == pytest.approx(best, abs=1e-6)
    assert got <= best + 1e-9  # never above the true optimum
    assert (alpha >= -1e-12).all() and (alpha <= C + 1e-12).all()
    assert abs(float(alpha @ y)) < 1e-9
    assert kkt_violation(K, y, alpha, b, C) <= 1e-6


def test_smo_small_box_keeps_multipliers_at_bounds():
    # With a tiny box every point is driven to a bound; the optimum is still
    # matched against enumeration.
    X, y = _random_binary_problem(7, n=6)
    K = X @ X.T
    C = 0.01
    alpha, b, converged, _ = smo_solve(K, y, C, tol=1e-10, max_passes=5000)
    assert converged
    assert dual_objective(K, y, alpha) == pytest.approx(
        svm_dual_max_reference(K, y, C), abs=1e-8
    )


def test_smo_flags_exhausted_pass_budget():
    X, y = _random_binary_problem(8, n=12)
    K = rbf_kernel_reference(X, X, 1.0)
    alpha, _, converged, passes = smo_solve(K, y, 10.0, tol=1e-9, max_passes=1)
    assert passes == 1
    assert not converged


def test_duplicating_a_non_support_point_keeps_the_optimum():
    X, y = _random_binary_problem(9, n=8)
    K = X @ X.T
    alpha, _, converged, _ = smo_solve(K, y, 1.0, tol=1e-9, max_passes=5000)
    assert converged
    idle = int(np.argmin(alpha))
    assert alpha[idle] <= SUPPORT_ALPHA_MIN
    X2 = np.vstack([X, X[idle]])
    y2 = np.append(y, y[idle])
    K2 = X2 @ X2.T
    alpha2, _, converged2, _ = smo_solve(K2, y2, 1.0, tol=1e-9, max_passes=5000)
    assert converged2
    assert dual_objective(K2, y2, alpha2) == pytest.approx(
        dual_objective(K, y, alpha), abs=1e-7
    )


def test_classifier_separates_distant_blobs_exactly():
    rng = np.random.default_rng(10)
    centers = np.array([[0.0, 0.0], [12.0, 0.0], [0.0, 12.0], [12.0, 12.0], [6.0, 20.0]])
    X = np.vstack([c + rng.normal(scale=0.4, size=(12, 2)) for c in centers])
    y = np.repeat(np.arange(5), 12)
    for kernel in ("rbf", "linear"):
        clf = SvmClassifier(C=5.0, kernel=kernel).fit(X, y)
        assert clf.classes_.tolist() == [0, 1, 2, 3, 4]
        assert len(clf.pairs_) == 10
        assert all(p.converged for p in clf.pairs_)
        np.testing.assert_array_equal(clf.predict(X), y)


def test_stored_support_vectors_are_pruned_and_positive():
    X, _ = _random_binary_problem(11, n=30)
    y = (X[:, 0] > 0).astype(int)
    clf = SvmClassifier(C=1.0).fit(X, y)
    (pair,) = clf.pairs_
    assert (pair.sv_alpha > SUPPORT_ALPHA_MIN).all()
    assert len(pair.sv_alpha) <= 30
    assert pair.class_lo == 0 and pair.class_hi == 1
    assert set(np.unique(pair.sv_y)) <= {-1.0, 1.0}


def test_pairwise_duals_meet_kkt_conditions_on_sampled_features(phantom_training):
    X, y, scaler, _ = phantom_training
    Z = scaler.transform(X)
    with warnings.catch_warnings():
        # A pair whose rows are near-identical in feature space can stall the
        # optimizer; it must then report non-convergence, never a false pass.
        warnings.simplefilter("always")
        clf = SvmClassifier(C=1.0).fit(Z, y)
    assert len(clf.pairs_) == 10
    for state in clf.pair_states_:
        Xp, yp, alpha = state["X"], state["y"], state["alpha"]
        K = rbf_kernel_reference(Xp, Xp, clf.gamma_)
        assert (alpha >= 0.0).all() and (alpha <= clf.C + 1e-12).all()
        assert abs(float(alpha @ yp)) <= 1e-6
        violation = kkt_violation(K, yp, alpha, state["bias"], clf.C)
        if state["converged"]:
            assert violation <= 1e-3
        else:
            assert violation > 1e-3  # the flag is honest in both directions


def test_default_gamma_is_inverse_feature_count(phantom_training):
    X, y, scaler, _ = phantom_training
    clf = SvmClassifier().fit(scaler.transform(X), y)
    assert clf.gamma_ == pytest.approx(1.0 / 9.0)


def test_refit_is_bit_identical(phantom_training):
    X, y, scaler, _ = phantom_training
    Z = scaler.transform(X)
    a = SvmClassifier(C=1.0).fit(Z, y)
    b = SvmClassifier(C=1.0).fit(Z, y)
    for pa, pb in zip(a.pairs_, b.pairs_):
        np.testing.assert_array_equal(pa.sv_alpha, pb.sv_alpha)
        assert pa.bias == pb.bias
    rng = np.random.default_rng(12)
    Q = rng.normal(size=(64, 9))
    np.testing.assert_array_equal(a.predict(Q), b.predict(Q))


def _stub_classifier(strength_for_class_1):
    # Three classes, one vote each by construction; the tie is broken by the
    # summed magnitude of winning decision values, then by lowest code.
    clf = SvmClassifier(kernel="linear")
    clf.classes_ = np.array([0, 1, 2])
    clf.gamma_ = 1.0
    one = np.array([[1.0]])
    clf.pairs_ = [
        PairModel(0, 1, one, np.array([1.0]), np.array([1.0]), 0.0),   # d(x) = x
        PairModel(0, 2, one, np.array([-1.0]), np.array([1.0]), 0.0),  # d(x) = -x
        PairModel(1, 2, one, np.array([1.0]),
                  np.array([strength_for_class_1 / 2.0]), 0.0),
    ]
    return clf


def test_vote_tie_breaks_by_decision_strength_then_lowest_code():
    q = np.array([[2.0]])
    # Votes: class 0 wins (0,1) with |d|=2, class 2 wins (0,2) with |d|=2,
    # class 1 wins (1,2) with |d| as constructed.
    assert _stub_classifier(3.0).predict(q)[0] == 1  # strongest winner
    assert _stub_classifier(2.0).predict(q)[0] == 0  # exact tie -> lowest code


def test_exhausted_budget_warns_and_still_predicts():
    rng = np.random.default_rng(13)
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 2, size=40)
    with pytest.warns(ConvergenceWarning):
        clf = SvmClassifier(max_passes_factor=0).fit(X, y)
    assert not clf.pairs_[0].converged
    assert clf.predict(X).shape == (40,)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"C": 0.0},
        {"C": -2.0},
        {"kernel": "poly"},
        {"gamma": 0.0},
        {"gamma": -1.0},
        {"tol": 0.0},
    ],
)
def test_invalid_hyperparameters_rejected(kwargs):
    X, y = _random_binary_problem(14, n=10)
    with pytest.raises(InvalidConfig):
        SvmClassifier(**kwargs).fit(X, (y > 0).astype(int))


def test_single_class_training_rejected():
    X = np.zeros((5, 2))
    with pytest.raises(InvalidConfig):
        SvmClassifier().fit(X, np.zeros(5, dtype=int))
