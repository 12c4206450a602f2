"""Versioned JSON serialization of trained models.

A model bundle carries everything segmentation needs: the filter-bank config,
the fitted feature scaler, and the classifier state. Arrays are stored as
JSON lists (shortest-roundtrip float repr), so save -> load -> save is
byte-identical. Loading validates structural invariants and raises
ModelLoadError on any malformed document.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .classifiers import IsnnClassifier, KnnClassifier, PnnClassifier, SvmClassifier
from .classifiers.svm import PairModel, SUPPORT_ALPHA_MIN
from .errors import MissingFile, ModelLoadError
from .gabor import FeatureScaler, GaborConfig
from .io import write_atomic

_FORMAT = "brainseg-model"
_VERSION = 1


def _classifier_doc(classifier) -> dict:
    if isinstance(classifier, PnnClassifier):
        return {
            "kind": "pnn",
            "params": {
                "sigma": classifier.sigma,
                "priors": None if classifier.priors is None else list(classifier.priors),
                "costs": None if classifier.costs is None else list(classifier.costs),
            },
            "state": {
                "X": classifier.X_.tolist(),
                "y": classifier.classes_[classifier.y_idx_].tolist(),
            },
        }
    if isinstance(classifier, KnnClassifier):
        return {
            "kind": "knn",
            "params": {"k": classifier.k},
            "state": {"X": classifier.X_.tolist(), "y": classifier.y_.tolist()},
        }
    if isinstance(classifier, IsnnClassifier):
        return {
            "kind": "isnn",
            "params": {
                "mu": classifier.mu,
                "epochs": classifier.epochs,
                "shuffle_seed": classifier.shuffle_seed,
            },
            "state": {
                "classes": classifier.classes_.tolist(),
                "nodes": classifier.nodes_.tolist(),
                "node_classes": classifier.node_classes_.tolist(),
            },
        }
    if isinstance(classifier, SvmClassifier):
        return {
            "kind": "svm",
            "params": {
                "C": classifier.C,
                "kernel": classifier.kernel,
                "gamma": classifier.gamma,
                "tol": classifier.tol,
                "max_passes_factor": classifier.max_passes_factor,
            },
            "state": {
                "classes": classifier.classes_.tolist(),
                "gamma_effective": classifier.gamma_,
                "pairs": [
                    {
                        "class_lo": pair.class_lo,
                        "class_hi": pair.class_hi,
                        "sv_x": pair.sv_x.tolist(),
                        "sv_y": pair.sv_y.tolist(),
                        "sv_alpha": pair.sv_alpha.tolist(),
                        "bias": pair.bias,
                        "converged": pair.converged,
                    }
                    for pair in classifier.pairs_
                ],
            },
        }
    raise ModelLoadError(f"unsupported classifier type {type(classifier).__name__}")


def save_model(
    path: str | os.PathLike,
    classifier,
    scaler: FeatureScaler,
    gabor_config: GaborConfig,
    config: dict | None = None,
) -> None:
    doc = {
        "format": _FORMAT,
        "version": _VERSION,
        "gabor": gabor_config.to_dict(),
        "scaler": scaler.to_dict(),
        "classifier": _classifier_doc(classifier),
    }
    if config is not None:
        doc["config"] = config
    write_atomic(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())


def _load_pnn(params: dict, state: dict) -> PnnClassifier:
    clf = PnnClassifier(
        sigma=params["sigma"], priors=params["priors"], costs=params["costs"]
    )
    return clf.fit(np.asarray(state["X"], dtype=np.float64), np.asarray(state["y"]))


def _load_knn(params: dict, state: dict) -> KnnClassifier:
    clf = KnnClassifier(k=params["k"])
    return clf.fit(np.asarray(state["X"], dtype=np.float64), np.asarray(state["y"]))


def _load_isnn(params: dict, state: dict) -> IsnnClassifier:
    clf = IsnnClassifier(
        mu=params["mu"], epochs=params["epochs"], shuffle_seed=params["shuffle_seed"]
    )
    if not 0.0 < clf.mu < 1.0:
        raise ModelLoadError(f"mu must be in (0, 1), got {clf.mu}")
    clf.classes_ = np.asarray(state["classes"])
    clf.nodes_ = np.asarray(state["nodes"], dtype=np.float64)
    clf.node_classes_ = np.asarray(state["node_classes"])
    if clf.nodes_.ndim != 2 or clf.nodes_.shape[0] != clf.node_classes_.shape[0]:
        raise ModelLoadError("node array shapes disagree")
    missing = set(clf.classes_.tolist()) - set(clf.node_classes_.tolist())
    if missing:
        raise ModelLoadError(f"classes without any node: {sorted(missing)}")
    return clf


def _load_svm(params: dict, state: dict) -> SvmClassifier:
    clf = SvmClassifier(
        C=params["C"],
        kernel=params["kernel"],
        gamma=params["gamma"],
        tol=params["tol"],
        max_passes_factor=params["max_passes_factor"],
    )
    clf._validate_params(1)  # validates C/kernel/tol; gamma_ overwritten below
    clf.gamma_ = state["gamma_effective"]
    clf.classes_ = np.asarray(state["classes"])
    n = len(clf.classes_)
    expected_pairs = n * (n - 1) // 2
    if len(state["pairs"]) != expected_pairs:
        raise ModelLoadError(
            f"expected {expected_pairs} class pairs, got {len(state['pairs'])}"
        )
    clf.pairs_ = []
    for doc in state["pairs"]:
        alpha = np.asarray(doc["sv_alpha"], dtype=np.float64)
        sv_y = np.asarray(doc["sv_y"], dtype=np.float64)
        if alpha.size and (alpha.min() < -SUPPORT_ALPHA_MIN
                           or alpha.max() > clf.C + SUPPORT_ALPHA_MIN):
            raise ModelLoadError("support multipliers outside [0, C]")
        if abs(float(alpha @ sv_y)) > 1e-6:
            raise ModelLoadError("pair multipliers violate sum(alpha*y) = 0")
        clf.pairs_.append(
            PairModel(
                int(doc["class_lo"]),
                int(doc["class_hi"]),
                np.asarray(doc["sv_x"], dtype=np.float64),
                sv_y,
                alpha,
                float(doc["bias"]),
                bool(doc["converged"]),
            )
        )
    clf.pair_states_ = []
    return clf


_LOADERS = {"pnn": _load_pnn, "knn": _load_knn, "isnn": _load_isnn, "svm": _load_svm}


def load_model(path: str | os.PathLike):
    """Load a model bundle -> (classifier, scaler, gabor_config, config_echo)."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such file: {path}")
    try:
        doc = json.loads(path.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelLoadError(f"model file is not valid JSON: {path} ({exc})") from None
    try:
        if doc.get("format") != _FORMAT:
            raise ModelLoadError(f"not a model document: format {doc.get('format')!r}")
        if doc.get("version") != _VERSION:
            raise ModelLoadError(f"unsupported model version {doc.get('version')!r}")
        gabor_config = GaborConfig.from_dict(doc["gabor"])
        scaler = FeatureScaler.from_dict(doc["scaler"])
        cdoc = doc["classifier"]
        loader = _LOADERS.get(cdoc.get("kind"))
        if loader is None:
            raise ModelLoadError(f"unknown classifier kind {cdoc.get('kind')!r}")
        classifier = loader(cdoc["params"], cdoc["state"])
    except ModelLoadError:
        raise
    except Exception as exc:
        raise ModelLoadError(f"malformed model document: {path} ({exc})") from None
    return classifier, scaler, gabor_config, doc.get("config")
